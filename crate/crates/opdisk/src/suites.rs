//! Randomized verification suites with deterministic seeding, JSON
//! reports, and the moment-image CSV emitter.
//!
//! Every check draws its samples from per-sample streams derived as
//! `seed ^ salt(check_name) ^ index`, so results are independent of
//! execution order and thread count. `OPDISK_THREADS` caps worker threads;
//! unset means serial.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::{
    fun_calc, sample_positive, sample_unitary, sample_with, Algebra, AlgebraElement, SampleStyle,
    SpectralFn, Valuation, C64, I,
};
use crate::bundles::{
    canonical_form, coeff_derivative, curvature, curvature_fd, endo_norm, module_action,
    taut_derivative, taut_derivative_fd, CurveData, FiberEndomorphism, Poly,
};
use crate::disk::{
    act, act_sphere, act_tangent, basis_completion, disk_coords, disk_point, disk_pushforward,
    disk_velocity, fiber_unitary, horizontal_generator, lift, projection_defect, q_from_b,
    sample_projection, sample_sphere, sample_tangent, section, tangent_defect, tangent_from_lift,
    ProjectionPoint, SpherePoint, TangentVector,
};
use crate::doubled::{
    exp_to_group, sample_group, sample_lie, sharp, theta, DoubledMatrix, DoubledVector, LieElement,
};
use crate::error::{Error, Result};
use crate::halfspace::{
    d_liouville, d_liouville_fd, halfspace_lift, halfspace_section, intertwiner, liouville,
    mobius_pushforward, mobius_to_disk, mobius_to_halfspace, projection_h, spd_bracket, theta_h,
    trace_product, x_perp, HalfSpacePoint, HalfTangent,
};
use crate::kahler::{
    complex_structure, finsler_norm, hilbertian_product, manifold_connection, symplectic_form,
};
use crate::moment::{
    convexity_witness, inf_action, moment_gradient_check, moment_map, moment_map_in_basis,
    poisson_defect, restricted_image, valuated_moment,
};
use crate::rng::{salt, Rng};
use crate::scalar_disk::{poincare_metric, scalar_connection, scalar_moment, PolyField};

/// Configuration of one suite run.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteConfig {
    #[serde(serialize_with = "serialize_algebra")]
    pub algebra: Algebra,
    pub samples: usize,
    pub seed: u64,
    pub tol_exact: f64,
    pub tol_fd: f64,
    pub fd_step: f64,
}

fn serialize_algebra<S: serde::Serializer>(
    a: &Algebra,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&a.to_string())
}

impl SuiteConfig {
    pub fn new(algebra: Algebra, samples: usize, seed: u64) -> Result<Self> {
        let cfg = SuiteConfig {
            algebra,
            samples,
            seed,
            tol_exact: 1e-9,
            tol_fd: 1e-4,
            fd_step: 1e-4,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config("samples must be >= 1".into()));
        }
        if self.tol_exact <= 0.0 || self.tol_fd <= 0.0 || self.fd_step <= 0.0 {
            return Err(Error::Config("tolerances and step must be positive".into()));
        }
        if let Algebra::Matrix(0) | Algebra::Commutative(0) = self.algebra {
            return Err(Error::Config("carrier dimension must be positive".into()));
        }
        Ok(())
    }

    /// Pinned exact-arithmetic tolerance, scaled by the configured budget.
    fn exact(&self, pinned: f64) -> f64 {
        pinned * (self.tol_exact / 1e-9)
    }

    /// Pinned finite-difference tolerance, scaled by the configured budget.
    fn fd(&self, pinned: f64) -> f64 {
        pinned * (self.tol_fd / 1e-4)
    }
}

pub fn parse_algebra(s: &str) -> Result<Algebra> {
    let lower = s.trim().to_ascii_lowercase();
    if lower == "scalar" {
        return Ok(Algebra::Scalar);
    }
    let parse_dim = |d: &str| -> Result<usize> {
        let n: usize = d
            .parse()
            .map_err(|_| Error::Config(format!("bad dimension in algebra spec '{s}'")))?;
        if n == 0 || n > 16 {
            return Err(Error::Config("algebra dimension must be in 1..=16".into()));
        }
        Ok(n)
    };
    if let Some(d) = lower.strip_prefix("matrix:") {
        return Ok(Algebra::Matrix(parse_dim(d)?));
    }
    if let Some(d) = lower.strip_prefix("commutative:") {
        return Ok(Algebra::Commutative(parse_dim(d)?));
    }
    Err(Error::Config(format!(
        "unknown algebra '{s}' (expected matrix:N, commutative:K, or scalar)"
    )))
}

/// Outcome of one named check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub check_name: String,
    pub samples: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl CheckReport {
    fn new(name: &str, samples: usize, max_error: f64, tolerance: f64) -> Self {
        CheckReport {
            check_name: name.to_string(),
            samples,
            max_error,
            tolerance,
            passed: max_error <= tolerance,
            metadata: BTreeMap::new(),
        }
    }

    fn with_meta(mut self, key: &str, value: serde_json::Value) -> Self {
        self.metadata.insert(key.to_string(), value);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Algebraic,
    Differential,
    ScalarOracle,
    Moment,
    Halfspace,
    All,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Algebraic => "algebraic",
            Suite::Differential => "differential",
            Suite::ScalarOracle => "scalar_oracle",
            Suite::Moment => "moment",
            Suite::Halfspace => "halfspace",
            Suite::All => "all",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "algebraic" => Ok(Suite::Algebraic),
            "differential" => Ok(Suite::Differential),
            "scalar_oracle" | "scalar-oracle" => Ok(Suite::ScalarOracle),
            "moment" => Ok(Suite::Moment),
            "halfspace" => Ok(Suite::Halfspace),
            "all" => Ok(Suite::All),
            other => Err(Error::Config(format!("unknown suite '{other}'"))),
        }
    }
}

/// Top-level report written by the CLI.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub config: SuiteConfig,
    pub suite: String,
    pub checks: Vec<CheckReport>,
    pub all_passed: bool,
}

impl Report {
    pub fn assemble(config: SuiteConfig, suite: &str, checks: Vec<CheckReport>) -> Self {
        let all_passed = checks.iter().all(|c| c.passed);
        Report {
            schema: 1,
            config,
            suite: suite.to_string(),
            checks,
            all_passed,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Maps indices over an optional scoped thread pool sized by
/// `OPDISK_THREADS`; results keep index order either way.
pub fn parallel_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let workers = std::env::var("OPDISK_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&w| w >= 2);
    match workers {
        None => (0..n).map(f).collect(),
        Some(w) => std::thread::scope(|scope| {
            let chunk = n.div_ceil(w);
            let mut handles = Vec::new();
            for c in 0..w {
                let lo = c * chunk;
                let hi = ((c + 1) * chunk).min(n);
                if lo >= hi {
                    break;
                }
                let f_ref = &f;
                handles.push(scope.spawn(move || (lo..hi).map(f_ref).collect::<Vec<T>>()));
            }
            let mut out = Vec::with_capacity(n);
            for h in handles {
                out.extend(h.join().expect("sample worker panicked"));
            }
            out
        }),
    }
}

fn max_err(cfg: &SuiteConfig, name: &str, f: impl Fn(usize, &mut Rng) -> f64 + Sync) -> f64 {
    let s = salt(name);
    parallel_map(cfg.samples, |i| {
        let mut rng = Rng::for_sample(cfg.seed, s, i as u64);
        f(i, &mut rng)
    })
    .into_iter()
    .fold(0.0, f64::max)
}

fn unit_tangent(q: &ProjectionPoint, rng: &mut Rng) -> TangentVector {
    let t = sample_tangent(q, rng);
    t.scale(C64::new(1.0 / t.norm().max(1e-12), 0.0))
}

fn unit_lie(alg: Algebra, rng: &mut Rng) -> LieElement {
    let a = sample_lie(alg, rng);
    a.scale_real(1.0 / a.norm().max(1e-12))
}

// ---------------------------- algebraic checks ----------------------------

fn check_c_star_identity(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "c_star_identity", |_, rng| {
        let a = sample_with(cfg.algebra, rng, SampleStyle::General);
        let lhs = a.adjoint().mul(&a).op_norm();
        let rhs = a.op_norm() * a.op_norm();
        (lhs - rhs).abs() / rhs.max(1e-30)
    });
    CheckReport::new("c_star_identity", cfg.samples, err, cfg.exact(1e-9))
}

fn check_functional_calculus(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "functional_calculus", |_, rng| {
        let p = sample_positive(cfg.algebra, rng);
        let scale = p.op_norm().max(1.0);
        let one = AlgebraElement::one(cfg.algebra);
        let s = fun_calc(&p, SpectralFn::Sqrt).expect("positive");
        let isq = fun_calc(&p, SpectralFn::InvSqrt).expect("positive");
        let inv = fun_calc(&p, SpectralFn::Inverse).expect("positive");
        let h = sample_with(cfg.algebra, rng, SampleStyle::Hermitian);
        let abs_direct = fun_calc(&h, SpectralFn::Abs).expect("hermitian");
        let abs_via_square = fun_calc(&h.mul(&h), SpectralFn::Sqrt).expect("positive");
        let commute = s.mul(&p).norm_diff(&p.mul(&s));
        [
            s.mul(&s).norm_diff(&p) / scale,
            isq.mul(&s).norm_diff(&one) / scale,
            inv.mul(&p).norm_diff(&one) / scale,
            abs_direct.norm_diff(&abs_via_square) / h.op_norm().max(1.0),
            commute / scale,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    });
    CheckReport::new("functional_calculus", cfg.samples, err, cfg.exact(1e-9))
}

fn check_valuation(cfg: &SuiteConfig) -> CheckReport {
    let nu = Valuation::canonical(cfg.algebra);
    let err = max_err(cfg, "valuation", |_, rng| {
        let a = sample_with(cfg.algebra, rng, SampleStyle::General);
        let b = sample_with(cfg.algebra, rng, SampleStyle::General);
        let tracial = nu
            .apply(&a.mul(&b))
            .unwrap()
            .norm_diff(&nu.apply(&b.mul(&a)).unwrap());
        let pos = nu.apply(&a.adjoint().mul(&a)).unwrap();
        let pos_err = pos
            .hermitian_eigenvalues()
            .first()
            .map(|&lo| (-lo).max(0.0))
            .unwrap_or(0.0)
            .max(pos.hermitian_defect());
        let c = C64::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        let linear = nu
            .apply(&a.scale(c).add(&b))
            .unwrap()
            .norm_diff(&nu.apply(&a).unwrap().scale(c).add(&nu.apply(&b).unwrap()));
        tracial.max(pos_err).max(linear)
    });
    CheckReport::new("valuation", cfg.samples, err, cfg.exact(1e-12))
}

fn check_theta_form(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "theta_form", |_, rng| {
        let vec = |rng: &mut Rng| {
            DoubledVector::new(
                sample_with(cfg.algebra, rng, SampleStyle::General),
                sample_with(cfg.algebra, rng, SampleStyle::General),
            )
        };
        let x = vec(rng);
        let y = vec(rng);
        let c = C64::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        let sym = theta(&y, &x)
            .unwrap()
            .norm_diff(&theta(&x, &y).unwrap().adjoint());
        let right = theta(&x, &y.scale(c))
            .unwrap()
            .norm_diff(&theta(&x, &y).unwrap().scale(c));
        let left = theta(&x.scale(c), &y)
            .unwrap()
            .norm_diff(&theta(&x, &y).unwrap().scale(c.conj()));
        sym.max(right).max(left)
    });
    CheckReport::new("theta_form", cfg.samples, err, cfg.exact(1e-12))
}

fn check_sharp_adjoint(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "sharp_adjoint", |_, rng| {
        let mat = |rng: &mut Rng| {
            DoubledMatrix::new(
                sample_with(cfg.algebra, rng, SampleStyle::General),
                sample_with(cfg.algebra, rng, SampleStyle::General),
                sample_with(cfg.algebra, rng, SampleStyle::General),
                sample_with(cfg.algebra, rng, SampleStyle::General),
            )
        };
        let m = mat(rng);
        let n = mat(rng);
        let x = DoubledVector::new(
            sample_with(cfg.algebra, rng, SampleStyle::General),
            sample_with(cfg.algebra, rng, SampleStyle::General),
        );
        let y = DoubledVector::new(
            sample_with(cfg.algebra, rng, SampleStyle::General),
            sample_with(cfg.algebra, rng, SampleStyle::General),
        );
        let scale = m.op_norm().max(1.0) * n.op_norm().max(1.0);
        let invol = sharp(&sharp(&m)).norm_diff(&m) / m.op_norm().max(1.0);
        let antimult = sharp(&m.mul(&n)).norm_diff(&sharp(&n).mul(&sharp(&m))) / scale;
        let adjoint = theta(&m.mul_vec(&x), &y)
            .unwrap()
            .norm_diff(&theta(&x, &sharp(&m).mul_vec(&y)).unwrap())
            / (m.op_norm().max(1.0) * x.norm().max(1.0) * y.norm().max(1.0));
        invol.max(antimult).max(adjoint)
    });
    CheckReport::new("sharp_adjoint", cfg.samples, err, cfg.exact(1e-12))
}

fn check_group_exponential(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "group_exponential", |_, rng| {
        let a = unit_lie(cfg.algebra, rng);
        let t = rng.uniform(-2.0, 2.0);
        let id = DoubledMatrix::identity(cfg.algebra);
        let g = exp_to_group(&a, t);
        let membership = sharp(g.matrix()).mul(g.matrix()).norm_diff(&id);
        let s = rng.uniform(-1.0, 1.0);
        let one_param = exp_to_group(&a, t + s)
            .matrix()
            .norm_diff(exp_to_group(&a, t).mul(&exp_to_group(&a, s)).matrix());
        let at_zero = exp_to_group(&a, 0.0).matrix().norm_diff(&id);
        membership.max(one_param).max(at_zero)
    });
    CheckReport::new("group_exponential", cfg.samples, err, cfg.exact(1e-9))
}

fn check_projection_structure(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "projection_structure", |_, rng| {
        let b = sample_with(cfg.algebra, rng, SampleStyle::General);
        let q = q_from_b(&b);
        let lam = crate::disk::lambda_of(&q).expect("nondegenerate");
        let rho = DoubledMatrix::rho(cfg.algebra);
        let p = DoubledMatrix::base_projection(cfg.algebra);
        let structural = projection_defect(q.matrix());
        let twist = lam.mul(&rho).mul(&lam).norm_diff(&rho);
        let conjugates = lam.mul(&p).mul(&sharp(&lam)).norm_diff(q.matrix());
        let sect = crate::disk::project(&section(&q).unwrap()).norm_diff(&q);
        structural.max(twist).max(conjugates).max(sect)
    });
    CheckReport::new("projection_structure", cfg.samples, err, cfg.exact(1e-9))
}

fn check_fiber_unitaries(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "fiber_unitaries", |_, rng| {
        let x = sample_sphere(cfg.algebra, rng);
        let u = sample_unitary(cfg.algebra, rng);
        let y = x.mul_unitary(&u);
        let same_fiber = crate::disk::project(&x).norm_diff(&crate::disk::project(&y));
        let rec = fiber_unitary(&x, &y, 1e-6).unwrap();
        let reconstruct = rec.norm_diff(&u);
        let one = AlgebraElement::one(cfg.algebra);
        let unitary = rec.adjoint().mul(&rec).norm_diff(&one);
        same_fiber.max(reconstruct).max(unitary)
    });
    CheckReport::new("fiber_unitaries", cfg.samples, err, cfg.exact(1e-12))
}

fn check_basis_completion(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "basis_completion", |_, rng| {
        let x = sample_sphere(cfg.algebra, rng);
        let (y, z) = basis_completion(&x).unwrap();
        let one = AlgebraElement::one(cfg.algebra);
        let q = crate::disk::project(&x);
        [
            theta(&y, &y).unwrap().norm_diff(&one),
            theta(&z, &z).unwrap().norm_diff(&one.neg()),
            theta(&y, &z).unwrap().op_norm(),
            theta(&z, &y).unwrap().op_norm(),
            q.matrix().mul_vec(&y).norm_diff(&y),
            q.matrix().mul_vec(&z).norm(),
            y.x1.hermitian_defect(),
            z.x2.hermitian_defect(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    });
    CheckReport::new("basis_completion", cfg.samples, err, cfg.exact(1e-9))
}

fn check_lift_lemma(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "lift_lemma", |_, rng| {
        let q = sample_projection(cfg.algebra, rng);
        let t = unit_tangent(&q, rng);
        let x = section(&q).unwrap();
        let v = lift(&t, &x).unwrap();
        let in_nullspace = q.matrix().mul_vec(&v).norm();
        let back = tangent_from_lift(&x, &v, 1e-6).unwrap();
        let pushes_forward = back.matrix().norm_diff(t.matrix());
        let u = sample_unitary(cfg.algebra, rng);
        let equivariant = lift(&t, &x.mul_unitary(&u))
            .unwrap()
            .norm_diff(&v.mul_right(&u));
        in_nullspace.max(pushes_forward).max(equivariant)
    });
    CheckReport::new("lift_lemma", cfg.samples, err, cfg.exact(1e-9))
}

fn check_horizontal_generators(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "horizontal_generators", |_, rng| {
        let q = sample_projection(cfg.algebra, rng);
        let t = unit_tangent(&q, rng);
        let gen = horizontal_generator(&t);
        let m = gen.to_matrix();
        let reproduces = m
            .mul(q.matrix())
            .sub(&q.matrix().mul(&m))
            .norm_diff(t.matrix());
        let antisym = sharp(&m).add(&m).op_norm();
        let pinched = q.matrix().mul(t.matrix()).mul(q.matrix()).op_norm();
        reproduces.max(antisym).max(pinched)
    });
    CheckReport::new("horizontal_generators", cfg.samples, err, cfg.exact(1e-10))
}

fn check_group_action(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "group_action", |_, rng| {
        let q = sample_projection(cfg.algebra, rng);
        let m = sample_group(cfg.algebra, rng);
        let x = sample_sphere(cfg.algebra, rng);
        let moved = act(&m, &q);
        let stays = projection_defect(moved.matrix());
        let equivariant = act(&m, &crate::disk::project(&x))
            .norm_diff(&crate::disk::project(&act_sphere(&m, &x)));
        // Orbit curves through a prescribed tangent stay on the space.
        let t = unit_tangent(&q, rng);
        let g = exp_to_group(&horizontal_generator(&t), rng.uniform(-0.7, 0.7));
        let orbit = projection_defect(act(&g, &q).matrix());
        stays.max(equivariant).max(orbit)
    });
    CheckReport::new("group_action", cfg.samples, err, cfg.exact(1e-9))
}

fn check_disk_coordinates(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "disk_coordinates", |_, rng| {
        let z = sample_with(cfg.algebra, rng, SampleStyle::Contraction(0.9));
        let q = disk_point(&z).unwrap();
        let roundtrip = disk_coords(&q).unwrap().norm_diff(&z);
        let membership = projection_defect(q.matrix());
        let b = sample_with(cfg.algebra, rng, SampleStyle::General);
        let other_way = {
            let q2 = q_from_b(&b);
            let z2 = disk_coords(&q2).unwrap();
            let inside = (z2.op_norm() - 1.0).max(0.0);
            disk_point(&z2).unwrap().norm_diff(&q2).max(inside)
        };
        roundtrip.max(membership).max(other_way)
    });
    CheckReport::new("disk_coordinates", cfg.samples, err, cfg.exact(1e-9))
}

fn check_complex_structure(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "complex_structure", |_, rng| {
        let q = sample_projection(cfg.algebra, rng);
        let x_t = unit_tangent(&q, rng);
        let y_t = unit_tangent(&q, rng);
        let twice = complex_structure(&complex_structure(&x_t));
        let squares = twice.matrix().add(x_t.matrix()).op_norm();
        let valid = tangent_defect(&q, complex_structure(&x_t).matrix());
        let ix_y = hilbertian_product(&complex_structure(&x_t), &y_t)
            .unwrap()
            .value
            .matrix;
        let x_iy = hilbertian_product(&x_t, &complex_structure(&y_t))
            .unwrap()
            .value
            .matrix;
        let compatible = ix_y.add(&x_iy).op_norm();
        let base = hilbertian_product(&x_t, &y_t).unwrap().value.matrix;
        let i_linear = x_iy.norm_diff(&base.scale(I));
        squares.max(valid).max(compatible).max(i_linear)
    });
    CheckReport::new("complex_structure", cfg.samples, err, cfg.exact(1e-10))
}

fn check_complex_structure_integrability(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "complex_structure_integrability", |_, rng| {
        let z = sample_with(cfg.algebra, rng, SampleStyle::Contraction(0.8));
        let a = sample_with(cfg.algebra, rng, SampleStyle::General);
        let t = disk_pushforward(&z, &a).unwrap();
        let rotated = complex_structure(&t);
        disk_velocity(&rotated).unwrap().norm_diff(&a.scale(I)) / a.op_norm().max(1.0)
    });
    CheckReport::new(
        "complex_structure_integrability",
        cfg.samples,
        err,
        cfg.exact(1e-9),
    )
}

fn check_hilbertian_product(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "hilbertian_product", |_, rng| {
        let q = sample_projection(cfg.algebra, rng);
        let x_t = unit_tangent(&q, rng);
        let y_t = unit_tangent(&q, rng);
        let gram = hilbertian_product(&x_t, &x_t).unwrap().value.matrix;
        let positive = gram
            .hermitian_eigenvalues()
            .first()
            .map(|&lo| (-lo).max(0.0))
            .unwrap_or(0.0)
            .max(gram.hermitian_defect());

        let a = sample_with(cfg.algebra, rng, SampleStyle::General);
        let phi = FiberEndomorphism::new(section(&q).unwrap(), a.clone());
        let module_linear = {
            let y_phi = module_action(&y_t, &phi).unwrap();
            let lhs = hilbertian_product(&x_t, &y_phi).unwrap().value.matrix;
            let rhs = hilbertian_product(&x_t, &y_t).unwrap().value.matrix.mul(&a);
            lhs.norm_diff(&rhs) / a.op_norm().max(1.0)
        };

        let conjugation = {
            let x = section(&q).unwrap();
            let u = sample_unitary(cfg.algebra, rng);
            let xu = x.mul_unitary(&u);
            let at_x = theta(&lift(&x_t, &x).unwrap(), &lift(&y_t, &x).unwrap())
                .unwrap()
                .neg();
            let at_xu = theta(&lift(&x_t, &xu).unwrap(), &lift(&y_t, &xu).unwrap())
                .unwrap()
                .neg();
            at_xu.norm_diff(&u.adjoint().mul(&at_x).mul(&u))
        };
        positive.max(module_linear).max(conjugation)
    });
    CheckReport::new("hilbertian_product", cfg.samples, err, cfg.exact(1e-10))
}

fn check_prequantization(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "prequantization", |_, rng| {
        let q = sample_projection(cfg.algebra, rng);
        let x_t = unit_tangent(&q, rng);
        let y_t = unit_tangent(&q, rng);
        let omega = symplectic_form(&x_t, &y_t).unwrap();
        let r = curvature(&x_t, &y_t).unwrap();
        let preq = omega.matrix.norm_diff(&r.matrix.scale(C64::new(0.0, 0.5)));
        let antisym = omega
            .matrix
            .add(&symplectic_form(&y_t, &x_t).unwrap().matrix)
            .op_norm();
        preq.max(antisym)
    });
    CheckReport::new("prequantization", cfg.samples, err, cfg.exact(1e-9))
}

fn check_curvature_structure(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "curvature_structure", |_, rng| {
        let q = sample_projection(cfg.algebra, rng);
        let x_t = unit_tangent(&q, rng);
        let y_t = unit_tangent(&q, rng);
        let rxy = curvature(&x_t, &y_t).unwrap();
        let ryx = curvature(&y_t, &x_t).unwrap();
        let antisym = rxy.matrix.add(&ryx.matrix).op_norm();
        // Canonical forms computed from different fiber bases coincide.
        let u = sample_unitary(cfg.algebra, rng);
        let x = section(&q).unwrap();
        let xu = x.mul_unitary(&u);
        let comm = x_t.matrix().commutator(y_t.matrix());
        let at_xu = FiberEndomorphism::new(
            SpherePoint::new(xu.vector().clone(), 1e-6).unwrap(),
            theta(xu.vector(), &comm.mul_vec(xu.vector())).unwrap(),
        );
        let basis_free = canonical_form(&at_xu)
            .unwrap()
            .matrix
            .norm_diff(&canonical_form(&rxy).unwrap().matrix);
        antisym.max(basis_free)
    });
    CheckReport::new("curvature_structure", cfg.samples, err, cfg.exact(1e-10))
}

fn check_finsler_invariance(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "finsler_invariance", |_, rng| {
        let q = sample_projection(cfg.algebra, rng);
        let t = unit_tangent(&q, rng);
        let m = sample_group(cfg.algebra, rng);
        let a = finsler_norm(&t).unwrap();
        let b = finsler_norm(&act_tangent(&m, &t)).unwrap();
        (a - b).abs() / a.max(1e-12)
    });
    CheckReport::new("finsler_invariance", cfg.samples, err, cfg.exact(1e-8))
}

fn check_finsler_norm_link(cfg: &SuiteConfig) -> CheckReport {
    let salt_v = salt("finsler_norm_link");
    let pairs = parallel_map(cfg.samples, |i| {
        let mut rng = Rng::for_sample(cfg.seed, salt_v, i as u64);
        let q = sample_projection(cfg.algebra, &mut rng);
        let t = unit_tangent(&q, &mut rng);
        let fnorm = finsler_norm(&t).unwrap();
        let link = endo_norm(&hilbertian_product(&t, &t).unwrap().value);
        (
            (fnorm * fnorm - link).abs() / link.max(1e-12),
            (fnorm - link).abs(),
        )
    });
    let err = pairs.iter().map(|p| p.0).fold(0.0, f64::max);
    let unsquared = pairs.iter().map(|p| p.1).fold(0.0, f64::max);
    CheckReport::new("finsler_norm_link", cfg.samples, err, cfg.exact(1e-8))
        .with_meta("unsquared_reading_max_error", serde_json::json!(unsquared))
}

// --------------------------- differential checks ---------------------------

fn random_poly(alg: Algebra, deg: usize, rng: &mut Rng) -> Poly {
    Poly {
        coeffs: (0..=deg)
            .map(|_| sample_with(alg, rng, SampleStyle::General))
            .collect(),
    }
}

fn check_taut_derivative(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "tautological_derivative", |_, rng| {
        let q = sample_projection(cfg.algebra, rng);
        let t = unit_tangent(&q, rng);
        let curve = CurveData::along_tangent(&t, random_poly(cfg.algebra, 2, rng)).unwrap();
        let t0 = rng.uniform(-0.2, 0.2);
        let exact = taut_derivative(&curve, t0);
        let fd_route = taut_derivative_fd(&curve, t0, cfg.fd_step);
        exact.norm_diff(&fd_route)
    });
    CheckReport::new("tautological_derivative", cfg.samples, err, cfg.fd(1e-6))
}

fn check_leibnitz_rule(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "leibnitz_rule", |_, rng| {
        let q = sample_projection(cfg.algebra, rng);
        let tan = unit_tangent(&q, rng);
        let a_poly = random_poly(cfg.algebra, 2, rng);
        let l_poly = random_poly(cfg.algebra, 2, rng);
        let sigma_curve = CurveData::along_tangent(&tan, a_poly.clone()).unwrap();
        let phi_curve = CurveData::along_tangent(&tan, l_poly.clone()).unwrap();
        let prod_curve = CurveData::along_tangent(&tan, l_poly.mul(&a_poly)).unwrap();

        let lhs = taut_derivative_fd(&prod_curve, 0.0, cfg.fd_step);
        let x0 = sigma_curve.x_at(0.0);
        let phi0 = FiberEndomorphism::new(x0, l_poly.eval(0.0));
        let mid = crate::bundles::endo_apply(&phi0, &taut_derivative(&sigma_curve, 0.0)).unwrap();
        let rhs = crate::bundles::endo_apply(
            &coeff_derivative(&phi_curve, 0.0),
            &sigma_curve.section_at(0.0),
        )
        .unwrap();
        lhs.sub(&mid).norm_diff(&rhs)
    });
    CheckReport::new("leibnitz_rule", cfg.samples, err, cfg.fd(1e-6))
}

fn check_curvature_fd(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "curvature_fd", |i, rng| {
        let q = sample_projection(cfg.algebra, rng);
        let x_t = unit_tangent(&q, rng);
        let y_t = unit_tangent(&q, rng);
        let sigma0 = if i % 2 == 0 {
            AlgebraElement::one(cfg.algebra)
        } else {
            sample_unitary(cfg.algebra, rng)
        };
        let closed = curvature(&x_t, &y_t).unwrap();
        let fd_route = curvature_fd(&x_t, &y_t, &sigma0, cfg.fd_step).unwrap();
        closed.matrix.norm_diff(&fd_route.matrix)
    });
    CheckReport::new("curvature_fd", cfg.samples, err, cfg.fd(1e-4))
}

fn check_connection_tangency(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "connection_tangency", |_, rng| {
        let q = sample_projection(cfg.algebra, rng);
        let y = unit_tangent(&q, rng);
        let gen = horizontal_generator(&y);
        let fixed = unit_lie(cfg.algebra, rng);
        let field = |t: f64| {
            let g = exp_to_group(&gen, t);
            inf_action(&fixed, &act(&g, &q))
        };
        let d = manifold_connection(field, &y, 0.0, cfg.fd_step).unwrap();
        tangent_defect(&q, d.matrix()) / d.norm().max(1.0)
    });
    CheckReport::new("connection_tangency", cfg.samples, err, cfg.fd(1e-6))
}

// ------------------------------ moment checks ------------------------------

fn check_infinitesimal_action(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "infinitesimal_action", |_, rng| {
        let q = sample_projection(cfg.algebra, rng);
        let a = unit_lie(cfg.algebra, rng);
        let t = inf_action(&a, &q);
        tangent_defect(&q, t.matrix()) / t.norm().max(1.0)
    });
    CheckReport::new("infinitesimal_action", cfg.samples, err, cfg.exact(1e-10))
}

fn check_moment_equivariance(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "moment_equivariance", |_, rng| {
        let q = sample_projection(cfg.algebra, rng);
        let a = unit_lie(cfg.algebra, rng);
        let m = sample_group(cfg.algebra, rng);
        let x = section(&q).unwrap();
        let f_here = moment_map_in_basis(&a, &x);
        let moved_a = LieElement::project(&m.conjugate(&a.to_matrix()));
        let moved_x = act_sphere(&m, &x);
        let f_there = moment_map_in_basis(&moved_a, &moved_x);
        f_there.matrix.norm_diff(&f_here.matrix)
    });
    CheckReport::new("moment_equivariance", cfg.samples, err, cfg.exact(1e-9))
}

fn check_moment_gradient(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "moment_gradient", |_, rng| {
        let q = sample_projection(cfg.algebra, rng);
        let a = unit_lie(cfg.algebra, rng);
        let y = unit_tangent(&q, rng);
        let (lhs, rhs) = moment_gradient_check(&a, &y, cfg.fd_step).unwrap();
        lhs.matrix.norm_diff(&rhs.matrix)
    });
    CheckReport::new("moment_gradient", cfg.samples, err, cfg.fd(1e-4))
}

fn check_poisson_bracket(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "poisson_bracket", |_, rng| {
        let q = sample_projection(cfg.algebra, rng);
        let a = unit_lie(cfg.algebra, rng);
        let b = unit_lie(cfg.algebra, rng);
        poisson_defect(&a, &b, &q).unwrap().matrix.op_norm()
    });
    CheckReport::new("poisson_bracket", cfg.samples, err, cfg.exact(1e-9))
}

fn check_valuated_moment(cfg: &SuiteConfig) -> CheckReport {
    let nu = Valuation::canonical(cfg.algebra);
    let salt_v = salt("valuated_moment");
    let rows = parallel_map(cfg.samples, |i| {
        let mut rng = Rng::for_sample(cfg.seed, salt_v, i as u64);
        let q = sample_projection(cfg.algebra, &mut rng);
        let a = unit_lie(cfg.algebra, &mut rng);
        let b = unit_lie(cfg.algebra, &mut rng);
        let va = valuated_moment(&nu, &a, &q).unwrap();
        let vb = valuated_moment(&nu, &b, &q).unwrap();
        let vsum = valuated_moment(&nu, &a.add(&b), &q).unwrap();
        let linear = vsum.value.sub(&va.value).sub(&vb.value).op_norm();
        (linear, va)
    });
    let linear_err = rows.iter().map(|r| r.0).fold(0.0, f64::max);

    // Least-squares fit of value = c · τ(q a) over all sample components.
    let mut num = C64::new(0.0, 0.0);
    let mut den = 0.0;
    for (_, vm) in &rows {
        for (v, t) in vm
            .value
            .components()
            .unwrap()
            .iter()
            .zip(vm.tau_pairing.components().unwrap().iter())
        {
            num += v * t.conj();
            den += t.norm_sqr();
        }
    }
    let constant = if den > 0.0 {
        num / den
    } else {
        C64::new(0.0, 0.0)
    };
    // The pairing is compared, not asserted: the fitted constant and the
    // residual relative to the overall value scale go to the metadata.
    let scale = rows
        .iter()
        .map(|(_, vm)| vm.value.op_norm())
        .fold(1e-12, f64::max);
    let residual = rows
        .iter()
        .map(|(_, vm)| vm.value.norm_diff(&vm.tau_pairing.scale(constant)) / scale)
        .fold(0.0, f64::max);

    CheckReport::new("valuated_moment", cfg.samples, linear_err, cfg.exact(1e-12))
        .with_meta("tau_proportionality_re", serde_json::json!(constant.re))
        .with_meta("tau_proportionality_im", serde_json::json!(constant.im))
        .with_meta("tau_relative_residual", serde_json::json!(residual))
}

fn check_restricted_image(cfg: &SuiteConfig) -> CheckReport {
    let one = AlgebraElement::one(cfg.algebra);
    let err = max_err(cfg, "restricted_image", |_, rng| {
        let q = sample_projection(cfg.algebra, rng);
        let img = restricted_image(&q).unwrap();
        let partition = img.c1.add(&img.c2).norm_diff(&one);
        let herm = img.c1.hermitian_defect();
        let low = img.c1.hermitian_eigenvalues()[0];
        partition.max(herm).max((1.0 - low).max(0.0))
    });
    CheckReport::new("restricted_image", cfg.samples, err, cfg.exact(1e-10))
}

fn check_convexity_witness(cfg: &SuiteConfig) -> CheckReport {
    let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
    let pairs = cfg.samples.div_ceil(grid.len()).max(1);
    let salt_v = salt("convexity_witness");
    let one = AlgebraElement::one(cfg.algebra);
    let errs = parallel_map(pairs, |i| {
        let mut rng = Rng::for_sample(cfg.seed, salt_v, i as u64);
        let pa = restricted_image(&sample_projection(cfg.algebra, &mut rng)).unwrap();
        let pb = restricted_image(&sample_projection(cfg.algebra, &mut rng)).unwrap();
        grid.iter()
            .map(|&t| {
                let (z, check) = convexity_witness(&pa, &pb, t).unwrap();
                let mix = pa
                    .c1
                    .scale(C64::new(t, 0.0))
                    .add(&pb.c1.scale(C64::new(1.0 - t, 0.0)));
                let inside = (z.op_norm() - 1.0).max(0.0);
                check
                    .c1
                    .norm_diff(&mix)
                    .max(check.c2.norm_diff(&one.sub(&mix)))
                    .max(inside)
            })
            .fold(0.0, f64::max)
    });
    let err = errs.into_iter().fold(0.0, f64::max);
    CheckReport::new("convexity_witness", pairs * grid.len(), err, cfg.exact(1e-9))
}

// ---------------------------- scalar-oracle checks ----------------------------

fn check_scalar_product_match(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "scalar_product_match", |i, rng| {
        let (z, a, b) = if i == 0 {
            // The pinned value <1,1> at z = 1/2.
            (C64::new(0.5, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0))
        } else {
            let z = sample_with(Algebra::Scalar, rng, SampleStyle::Contraction(0.9))
                .as_scalar()
                .unwrap();
            (z, rng.next_complex_gauss(), rng.next_complex_gauss())
        };
        let x_a = disk_pushforward(&AlgebraElement::scalar(z), &AlgebraElement::scalar(a)).unwrap();
        let x_b = disk_pushforward(&AlgebraElement::scalar(z), &AlgebraElement::scalar(b)).unwrap();
        let general = hilbertian_product(&x_a, &x_b)
            .unwrap()
            .value
            .matrix
            .as_scalar()
            .unwrap();
        let classical = poincare_metric(z, a, b).unwrap();
        let mut err = (general - classical).norm() / classical.norm().max(1.0);
        if i == 0 {
            err = err.max((classical - C64::new(16.0 / 9.0, 0.0)).norm());
        }
        err
    });
    CheckReport::new("scalar_product_match", cfg.samples, err, cfg.exact(1e-10))
}

fn check_scalar_connection_match(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "scalar_connection_match", |_, rng| {
        let field = PolyField::random(2, rng);
        let b = rng.next_complex_gauss();
        let zero = AlgebraElement::scalar(C64::new(0.0, 0.0));
        let y = disk_pushforward(&zero, &AlgebraElement::scalar(b)).unwrap();
        let gen = horizontal_generator(&y);
        let p = ProjectionPoint::base(Algebra::Scalar);
        let tangent_field = |t: f64| {
            let g = exp_to_group(&gen, t);
            let qt = act(&g, &p);
            let zt = disk_coords(&qt).unwrap();
            let value = field.eval(zt.as_scalar().unwrap());
            disk_pushforward(&zt, &AlgebraElement::scalar(value)).unwrap()
        };
        let nabla = manifold_connection(tangent_field, &y, 0.0, cfg.fd_step).unwrap();
        let expected_coeff = scalar_connection(&field, b);
        let expected = disk_pushforward(&zero, &AlgebraElement::scalar(expected_coeff)).unwrap();
        nabla.matrix().norm_diff(expected.matrix()) / expected.norm().max(1.0)
    });
    CheckReport::new("scalar_connection_match", cfg.samples, err, cfg.fd(1e-6))
}

fn scalar_lie(alpha: f64, beta: f64, w: C64) -> LieElement {
    LieElement::new(
        &AlgebraElement::scalar(C64::new(0.0, alpha)),
        &AlgebraElement::scalar(C64::new(0.0, beta)),
        &AlgebraElement::scalar(w.conj()),
    )
}

fn check_scalar_moment_match(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "scalar_moment_match", |i, rng| {
        let (z, alpha, beta, w) = if i == 0 {
            (C64::new(0.0, 0.0), 0.9, -0.4, C64::new(0.2, 0.1))
        } else {
            (
                sample_with(Algebra::Scalar, rng, SampleStyle::Contraction(0.9))
                    .as_scalar()
                    .unwrap(),
                rng.uniform(-1.0, 1.0),
                rng.uniform(-1.0, 1.0),
                rng.next_complex_gauss(),
            )
        };
        let q = disk_point(&AlgebraElement::scalar(z)).unwrap();
        let f = moment_map(&scalar_lie(alpha, beta, w), &q).unwrap();
        let classical = scalar_moment(z, alpha, beta, w).unwrap();
        let mut err = (f.value.matrix.as_scalar().unwrap() - classical).norm();
        if i == 0 {
            err = err.max((classical - C64::new(alpha / 2.0, 0.0)).norm());
        }
        err
    });
    CheckReport::new("scalar_moment_match", cfg.samples, err, cfg.exact(1e-10))
}

fn check_commutative_componentwise(cfg: &SuiteConfig) -> CheckReport {
    let alg = Algebra::Commutative(2);
    let err = max_err(cfg, "commutative_componentwise", |_, rng| {
        let z = sample_with(alg, rng, SampleStyle::Contraction(0.9));
        let a = sample_with(alg, rng, SampleStyle::General);
        let b = sample_with(alg, rng, SampleStyle::General);

        // Product, componentwise.
        let x_a = disk_pushforward(&z, &a).unwrap();
        let x_b = disk_pushforward(&z, &b).unwrap();
        let general = hilbertian_product(&x_a, &x_b).unwrap().value.matrix;
        let classical = crate::scalar_disk::poincare_metric_elementwise(&z, &a, &b).unwrap();
        let product_err = general.norm_diff(&classical) / classical.op_norm().max(1.0);

        // Moment, componentwise.
        let alpha = sample_with(alg, rng, SampleStyle::AntiHermitian);
        let beta = sample_with(alg, rng, SampleStyle::AntiHermitian);
        let w = sample_with(alg, rng, SampleStyle::General);
        let lie = LieElement::new(&alpha, &beta, &w.adjoint());
        let q = disk_point(&z).unwrap();
        let f = moment_map(&lie, &q).unwrap();
        let classical_m = crate::scalar_disk::scalar_moment_elementwise(&z, &alpha, &beta, &w).unwrap();
        let moment_err = f.value.matrix.norm_diff(&classical_m);

        product_err.max(moment_err)
    });
    CheckReport::new("commutative_componentwise", cfg.samples, err, cfg.exact(1e-10))
}

// ----------------------------- halfspace checks -----------------------------

fn sample_halfspace_point(alg: Algebra, rng: &mut Rng) -> HalfSpacePoint {
    let x = sample_with(alg, rng, SampleStyle::Hermitian);
    let y = sample_positive(alg, rng);
    HalfSpacePoint::new(x, y).expect("sampled point is in the half-space")
}

fn check_mobius_roundtrip(cfg: &SuiteConfig) -> CheckReport {
    let err = max_err(cfg, "mobius_roundtrip", |_, rng| {
        let h = sample_halfspace_point(cfg.algebra, rng);
        let z = mobius_to_disk(&h).unwrap();
        let inside = (z.op_norm() - 1.0).max(0.0);
        let back = mobius_to_halfspace(&z).unwrap();
        let roundtrip = back.element().norm_diff(&h.element());
        let zc = sample_with(cfg.algebra, rng, SampleStyle::Contraction(0.9));
        let other = mobius_to_disk(&mobius_to_halfspace(&zc).unwrap())
            .unwrap()
            .norm_diff(&zc);
        inside.max(roundtrip).max(other)
    });
    CheckReport::new("mobius_roundtrip", cfg.samples, err, cfg.exact(1e-9))
}

fn check_model_intertwining(cfg: &SuiteConfig) -> CheckReport {
    let u = intertwiner(cfg.algebra);
    let err = max_err(cfg, "model_intertwining", |_, rng| {
        let vec = |rng: &mut Rng| {
            DoubledVector::new(
                sample_with(cfg.algebra, rng, SampleStyle::General),
                sample_with(cfg.algebra, rng, SampleStyle::General),
            )
        };
        let x = vec(rng);
        let y = vec(rng);
        let intertwine = theta_h(&u.mul_vec(&x), &u.mul_vec(&y))
            .unwrap()
            .norm_diff(&theta(&x, &y).unwrap());
        // K maps into K_H.
        let k = sample_sphere(cfg.algebra, rng);
        let moved = u.mul_vec(k.vector());
        let one = AlgebraElement::one(cfg.algebra);
        let sphere = theta_h(&moved, &moved).unwrap().norm_diff(&one);
        intertwine.max(sphere)
    });
    CheckReport::new("model_intertwining", cfg.samples, err, cfg.exact(1e-10))
}

fn check_orthogonal_complement(cfg: &SuiteConfig) -> CheckReport {
    let one = AlgebraElement::one(cfg.algebra);
    let err = max_err(cfg, "orthogonal_complement", |_, rng| {
        let h = sample_halfspace_point(cfg.algebra, rng);
        let x = halfspace_section(&h);
        let perp = x_perp(&x).unwrap();
        let unit = theta_h(&perp, &perp).unwrap().norm_diff(&one.neg());
        let orth = theta_h(&x, &perp).unwrap().op_norm();
        let null = projection_h(&x).mul_vec(&perp).norm() / perp.norm().max(1.0);
        unit.max(orth).max(null)
    });
    CheckReport::new("orthogonal_complement", cfg.samples, err, cfg.exact(1e-10))
}

fn check_halfspace_lift(cfg: &SuiteConfig) -> CheckReport {
    let one = AlgebraElement::one(cfg.algebra);
    let err = max_err(cfg, "halfspace_lift", |_, rng| {
        let h = sample_halfspace_point(cfg.algebra, rng);
        let x = halfspace_section(&h);
        let on_sphere = theta_h(&x, &x).unwrap().norm_diff(&one);
        let fibration = x
            .x2
            .mul(&x.x1.try_inverse().unwrap())
            .norm_diff(&h.element());
        let g = sample_with(cfg.algebra, rng, SampleStyle::General);
        let v = HalfTangent::new(
            h.clone(),
            g.scale(C64::new(1.0 / g.op_norm().max(1e-12), 0.0)),
        );
        let lifted = halfspace_lift(&h, &v);
        let horizontal = projection_h(&x).mul_vec(&lifted).norm();
        on_sphere.max(fibration).max(horizontal)
    });
    CheckReport::new("halfspace_lift", cfg.samples, err, cfg.exact(1e-9))
}

fn check_trace_product_split(cfg: &SuiteConfig) -> CheckReport {
    let nu = Valuation::canonical(cfg.algebra);
    let err = max_err(cfg, "trace_product_split", |_, rng| {
        let h = sample_halfspace_point(cfg.algebra, rng);
        let v = HalfTangent::new(h.clone(), sample_with(cfg.algebra, rng, SampleStyle::General));
        let w = HalfTangent::new(h.clone(), sample_with(cfg.algebra, rng, SampleStyle::General));
        let direct = trace_product(&nu, &v, &w).unwrap();

        let y_is = fun_calc(h.imag_part(), SpectralFn::InvSqrt).unwrap();
        let tv = y_is.mul(&v.v).mul(&y_is);
        let tw = y_is.mul(&w.v).mul(&y_is);
        let (xd, yd) = (tv.hermitian_part(), tv.imaginary_part());
        let (xi, eta) = (tw.hermitian_part(), tw.imaginary_part());
        let re = nu.apply(&xd.mul(&xi).add(&yd.mul(&eta))).unwrap();
        let im = nu.apply(&xd.mul(&eta).sub(&yd.mul(&xi))).unwrap();
        let split = re.add(&im.scale(I)).scale(C64::new(-0.25, 0.0));
        let split_err = direct.norm_diff(&split);

        let vv = trace_product(&nu, &v, &v).unwrap();
        let negativity = vv
            .components()
            .unwrap()
            .iter()
            .map(|c| c.re.max(0.0).max(c.im.abs()))
            .fold(0.0, f64::max);
        split_err.max(negativity)
    });
    CheckReport::new("trace_product_split", cfg.samples, err, cfg.exact(1e-10))
}

fn check_liouville_linearity(cfg: &SuiteConfig) -> CheckReport {
    let nu = Valuation::canonical(cfg.algebra);
    let err = max_err(cfg, "liouville_linearity", |_, rng| {
        let h = sample_halfspace_point(cfg.algebra, rng);
        let a = sample_with(cfg.algebra, rng, SampleStyle::General);
        let b = sample_with(cfg.algebra, rng, SampleStyle::General);
        let lam = C64::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        let lhs = liouville(&nu, &h, &a.scale(lam).add(&b)).unwrap();
        let rhs = liouville(&nu, &h, &a)
            .unwrap()
            .scale(lam)
            .add(&liouville(&nu, &h, &b).unwrap());
        lhs.norm_diff(&rhs)
    });
    CheckReport::new("liouville_linearity", cfg.samples, err, cfg.exact(1e-12))
}

fn precondition_step(h: &HalfSpacePoint, g: AlgebraElement) -> AlgebraElement {
    let floor = h.min_imag_eigenvalue();
    let bound = g.imaginary_part().op_norm();
    if bound * 10.0 > floor {
        g.scale(C64::new(floor / (10.0 * bound), 0.0))
    } else {
        g
    }
}

fn check_liouville_differential(cfg: &SuiteConfig) -> CheckReport {
    let nu = Valuation::canonical(cfg.algebra);
    let err = max_err(cfg, "liouville_differential", |_, rng| {
        let h = sample_halfspace_point(cfg.algebra, rng);
        let v = HalfTangent::new(
            h.clone(),
            precondition_step(&h, sample_with(cfg.algebra, rng, SampleStyle::General)),
        );
        let w = HalfTangent::new(
            h.clone(),
            precondition_step(&h, sample_with(cfg.algebra, rng, SampleStyle::General)),
        );
        let (closed, fd_val) = d_liouville_fd(&nu, &v, &w, cfg.fd_step).unwrap();
        let mismatch = closed.norm_diff(&fd_val) / closed.op_norm().max(1.0);
        let antisym = closed.add(&d_liouville(&nu, &w, &v).unwrap()).op_norm();
        mismatch.max(antisym)
    });
    CheckReport::new("liouville_differential", cfg.samples, err, cfg.fd(1e-5))
}

fn check_dalpha_proportionality(cfg: &SuiteConfig) -> CheckReport {
    let nu = Valuation::canonical(cfg.algebra);
    let salt_v = salt("dalpha_proportionality");
    let ratios: Vec<C64> = parallel_map(cfg.samples, |i| {
        let mut rng = Rng::for_sample(cfg.seed, salt_v, i as u64);
        let h = sample_halfspace_point(cfg.algebra, &mut rng);
        let v = HalfTangent::new(
            h.clone(),
            sample_with(cfg.algebra, &mut rng, SampleStyle::General),
        );
        let w = HalfTangent::new(
            h.clone(),
            sample_with(cfg.algebra, &mut rng, SampleStyle::General),
        );
        let d = d_liouville(&nu, &v, &w).unwrap();
        let im = trace_product(&nu, &v, &w).unwrap().imaginary_part();
        let pairs: Vec<(C64, C64)> = d
            .components()
            .unwrap()
            .into_iter()
            .zip(im.components().unwrap())
            .collect();
        pairs
            .into_iter()
            .filter(|(_, b)| b.norm() > 1e-6)
            .map(|(a, b)| a / b)
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();

    let mean = ratios.iter().sum::<C64>() / ratios.len().max(1) as f64;
    let spread = ratios
        .iter()
        .map(|r| (r - mean).norm() / mean.norm().max(1e-12))
        .fold(0.0, f64::max);
    CheckReport::new("dalpha_proportionality", cfg.samples, spread, cfg.fd(1e-4))
        .with_meta("constant_re", serde_json::json!(mean.re))
        .with_meta("constant_im", serde_json::json!(mean.im))
}

fn check_cross_model_product(cfg: &SuiteConfig) -> CheckReport {
    let nu = Valuation::canonical(cfg.algebra);
    let salt_v = salt("cross_model_product");
    let pairs: Vec<(C64, C64)> = parallel_map(cfg.samples, |i| {
        let mut rng = Rng::for_sample(cfg.seed, salt_v, i as u64);
        let h = sample_halfspace_point(cfg.algebra, &mut rng);
        let v = HalfTangent::new(
            h.clone(),
            sample_with(cfg.algebra, &mut rng, SampleStyle::General),
        );
        let w = HalfTangent::new(
            h.clone(),
            sample_with(cfg.algebra, &mut rng, SampleStyle::General),
        );
        let half_side = trace_product(&nu, &v, &w).unwrap();

        let z = mobius_to_disk(&h).unwrap();
        let a = mobius_pushforward(&h, &v.v).unwrap();
        let b = mobius_pushforward(&h, &w.v).unwrap();
        let x_a = disk_pushforward(&z, &a).unwrap();
        let x_b = disk_pushforward(&z, &b).unwrap();
        let disk_side = nu
            .apply(&hilbertian_product(&x_a, &x_b).unwrap().value.matrix)
            .unwrap();
        (
            half_side.components().unwrap()[0],
            disk_side.components().unwrap()[0],
        )
    });
    let mut num = C64::new(0.0, 0.0);
    let mut den = 0.0;
    for (hs, ds) in &pairs {
        num += hs * ds.conj();
        den += ds.norm_sqr();
    }
    let constant = if den > 0.0 {
        num / den
    } else {
        C64::new(0.0, 0.0)
    };
    let scale = pairs.iter().map(|(hs, _)| hs.norm()).fold(1e-12, f64::max);
    let residual = pairs
        .iter()
        .map(|(hs, ds)| (hs - constant * ds).norm() / scale)
        .fold(0.0, f64::max);
    CheckReport::new("cross_model_product", cfg.samples, residual, cfg.exact(1e-9))
        .with_meta("constant_re", serde_json::json!(constant.re))
        .with_meta("constant_im", serde_json::json!(constant.im))
}

fn check_spd_invariance(cfg: &SuiteConfig) -> CheckReport {
    let nu = Valuation::canonical(cfg.algebra);
    let one = AlgebraElement::one(cfg.algebra);
    let err = max_err(cfg, "spd_invariance", |_, rng| {
        let y = sample_positive(cfg.algebra, rng);
        let x1 = sample_with(cfg.algebra, rng, SampleStyle::Hermitian);
        let x2 = sample_with(cfg.algebra, rng, SampleStyle::Hermitian);
        let base = spd_bracket(&nu, &y, &x1, &x2).unwrap();
        let g = sample_with(cfg.algebra, rng, SampleStyle::General)
            .add(&one.scale(C64::new(2.5, 0.0)));
        let g_inv = g.try_inverse().unwrap();
        let mv = |a: &AlgebraElement| g_inv.adjoint().mul(a).mul(&g_inv);
        let moved = spd_bracket(&nu, &mv(&y), &mv(&x1), &mv(&x2)).unwrap();
        moved.norm_diff(&base) / base.op_norm().max(1.0)
    });
    CheckReport::new("spd_invariance", cfg.samples, err, cfg.exact(1e-9))
}

fn check_spd_structure(cfg: &SuiteConfig) -> CheckReport {
    let nu = Valuation::canonical(cfg.algebra);
    let err = max_err(cfg, "spd_structure", |_, rng| {
        let y = sample_positive(cfg.algebra, rng);
        let x1 = sample_with(cfg.algebra, rng, SampleStyle::Hermitian);
        let x2 = sample_with(cfg.algebra, rng, SampleStyle::Hermitian);
        let ab = spd_bracket(&nu, &y, &x1, &x2).unwrap();
        let ba = spd_bracket(&nu, &y, &x2, &x1).unwrap();
        let symmetric = ab.norm_diff(&ba);
        let aa = spd_bracket(&nu, &y, &x1, &x1).unwrap();
        let psd = aa
            .components()
            .unwrap()
            .iter()
            .map(|c| (-c.re).max(0.0).max(c.im.abs()))
            .fold(0.0, f64::max);

        // The quarter relation against the trace product on the imaginary axis.
        let hy = HalfSpacePoint::new(AlgebraElement::zero(cfg.algebra), y.clone()).unwrap();
        let vi = HalfTangent::new(hy.clone(), x1.scale(I));
        let wi = HalfTangent::new(hy, x2.scale(I));
        let tp = trace_product(&nu, &vi, &wi).unwrap();
        let quarter = tp.norm_diff(&ab.scale(C64::new(-0.25, 0.0))) / ab.op_norm().max(1.0);
        symmetric.max(psd).max(quarter)
    });
    CheckReport::new("spd_structure", cfg.samples, err, cfg.exact(1e-10))
}

// ------------------------------ suite runner ------------------------------

type CheckFn = fn(&SuiteConfig) -> CheckReport;

fn algebraic_checks() -> Vec<CheckFn> {
    vec![
        check_c_star_identity,
        check_functional_calculus,
        check_valuation,
        check_theta_form,
        check_sharp_adjoint,
        check_group_exponential,
        check_projection_structure,
        check_fiber_unitaries,
        check_basis_completion,
        check_lift_lemma,
        check_horizontal_generators,
        check_group_action,
        check_disk_coordinates,
        check_complex_structure,
        check_complex_structure_integrability,
        check_hilbertian_product,
        check_prequantization,
        check_curvature_structure,
        check_finsler_invariance,
        check_finsler_norm_link,
    ]
}

fn differential_checks() -> Vec<CheckFn> {
    vec![
        check_taut_derivative,
        check_leibnitz_rule,
        check_curvature_fd,
        check_connection_tangency,
    ]
}

fn moment_checks() -> Vec<CheckFn> {
    vec![
        check_infinitesimal_action,
        check_moment_equivariance,
        check_moment_gradient,
        check_poisson_bracket,
        check_valuated_moment,
        check_restricted_image,
        check_convexity_witness,
    ]
}

fn scalar_oracle_checks() -> Vec<CheckFn> {
    vec![
        check_scalar_product_match,
        check_scalar_connection_match,
        check_scalar_moment_match,
        check_commutative_componentwise,
    ]
}

fn halfspace_checks() -> Vec<CheckFn> {
    vec![
        check_mobius_roundtrip,
        check_model_intertwining,
        check_orthogonal_complement,
        check_halfspace_lift,
        check_trace_product_split,
        check_liouville_linearity,
        check_liouville_differential,
        check_dalpha_proportionality,
        check_cross_model_product,
        check_spd_invariance,
        check_spd_structure,
    ]
}

/// Runs one check by its report name.
pub fn run_named_check(config: &SuiteConfig, name: &str) -> Result<CheckReport> {
    config.validate()?;
    let f: CheckFn = match name {
        "c_star_identity" => check_c_star_identity,
        "functional_calculus" => check_functional_calculus,
        "valuation" => check_valuation,
        "theta_form" => check_theta_form,
        "sharp_adjoint" => check_sharp_adjoint,
        "group_exponential" => check_group_exponential,
        "projection_structure" => check_projection_structure,
        "fiber_unitaries" => check_fiber_unitaries,
        "basis_completion" => check_basis_completion,
        "lift_lemma" => check_lift_lemma,
        "horizontal_generators" => check_horizontal_generators,
        "group_action" => check_group_action,
        "disk_coordinates" => check_disk_coordinates,
        "complex_structure" => check_complex_structure,
        "complex_structure_integrability" => check_complex_structure_integrability,
        "hilbertian_product" => check_hilbertian_product,
        "prequantization" => check_prequantization,
        "curvature_structure" => check_curvature_structure,
        "finsler_invariance" => check_finsler_invariance,
        "finsler_norm_link" => check_finsler_norm_link,
        "tautological_derivative" => check_taut_derivative,
        "leibnitz_rule" => check_leibnitz_rule,
        "curvature_fd" => check_curvature_fd,
        "connection_tangency" => check_connection_tangency,
        "infinitesimal_action" => check_infinitesimal_action,
        "moment_equivariance" => check_moment_equivariance,
        "moment_gradient" => check_moment_gradient,
        "poisson_bracket" => check_poisson_bracket,
        "valuated_moment" => check_valuated_moment,
        "restricted_image" => check_restricted_image,
        "convexity_witness" => check_convexity_witness,
        "scalar_product_match" => check_scalar_product_match,
        "scalar_connection_match" => check_scalar_connection_match,
        "scalar_moment_match" => check_scalar_moment_match,
        "commutative_componentwise" => check_commutative_componentwise,
        "mobius_roundtrip" => check_mobius_roundtrip,
        "model_intertwining" => check_model_intertwining,
        "orthogonal_complement" => check_orthogonal_complement,
        "halfspace_lift" => check_halfspace_lift,
        "trace_product_split" => check_trace_product_split,
        "liouville_linearity" => check_liouville_linearity,
        "liouville_differential" => check_liouville_differential,
        "dalpha_proportionality" => check_dalpha_proportionality,
        "cross_model_product" => check_cross_model_product,
        "spd_invariance" => check_spd_invariance,
        "spd_structure" => check_spd_structure,
        other => return Err(Error::Config(format!("unknown check '{other}'"))),
    };
    Ok(f(config))
}

/// Runs the selected suite; deterministic for a fixed config.
///
/// The scalar-oracle checks always run on the scalar and two-component
/// commutative carriers, independently of the configured algebra.
pub fn run_suite(config: &SuiteConfig, suite: Suite) -> Result<Vec<CheckReport>> {
    config.validate()?;
    let fns: Vec<CheckFn> = match suite {
        Suite::Algebraic => algebraic_checks(),
        Suite::Differential => differential_checks(),
        Suite::Moment => moment_checks(),
        Suite::ScalarOracle => scalar_oracle_checks(),
        Suite::Halfspace => halfspace_checks(),
        Suite::All => {
            let mut all = algebraic_checks();
            all.extend(differential_checks());
            all.extend(moment_checks());
            all.extend(scalar_oracle_checks());
            all.extend(halfspace_checks());
            all
        }
    };
    Ok(fns.iter().map(|f| f(config)).collect())
}

// ----------------------------- moment image CSV -----------------------------

/// Emits the restricted-moment image and convexity-witness table.
///
/// Sample rows carry the valuated image components of a disk point; witness
/// rows interpolate pairs of sampled images over t in {0, 1/4, 1/2, 3/4, 1}
/// and re-derive the preimage. Complex values occupy adjacent `_re`/`_im`
/// columns; the row order is deterministic.
pub fn moment_image_csv(config: &SuiteConfig, grid: usize) -> Result<String> {
    config.validate()?;
    if grid == 0 {
        return Err(Error::Config("grid must be >= 1".into()));
    }
    let nu = Valuation::canonical(config.algebra);
    let width = nu.target().dense_dim();

    // Disk points: a square lattice over |z| <= 0.9 for the scalar algebra,
    // seeded contractions otherwise.
    let mut zs: Vec<AlgebraElement> = Vec::new();
    match config.algebra {
        Algebra::Scalar => {
            for i in 0..grid {
                for j in 0..grid {
                    let coord = |k: usize| {
                        if grid == 1 {
                            0.0
                        } else {
                            -0.9 + 1.8 * k as f64 / (grid - 1) as f64
                        }
                    };
                    let z = C64::new(coord(i), coord(j));
                    if z.norm() <= 0.9 {
                        zs.push(AlgebraElement::scalar(z));
                    }
                }
            }
        }
        _ => {
            let s = salt("moment_image");
            for i in 0..grid * grid {
                let mut rng = Rng::for_sample(config.seed, s, i as u64);
                zs.push(sample_with(
                    config.algebra,
                    &mut rng,
                    SampleStyle::Contraction(0.9),
                ));
            }
        }
    }

    let mut out = String::new();
    out.push_str("kind,id,t");
    for part in ["c1", "c2"] {
        for j in 0..width {
            out.push_str(&format!(",nu_{part}_{j}_re,nu_{part}_{j}_im"));
        }
    }
    out.push_str(",defect,certificate_pass\n");

    let fmt = |v: f64| format!("{v:.12e}");
    let push_components = |out: &mut String, a: &AlgebraElement| {
        for c in a.components().expect("valuation target is componentwise") {
            out.push_str(&format!(",{},{}", fmt(c.re), fmt(c.im)));
        }
    };

    let one = AlgebraElement::one(config.algebra);
    let mut images = Vec::new();
    for (id, z) in zs.iter().enumerate() {
        let img = restricted_image(&disk_point(z)?)?;
        let defect = img
            .c1
            .add(&img.c2)
            .norm_diff(&one)
            .max(img.c1.hermitian_defect())
            .max((1.0 - img.c1.hermitian_eigenvalues()[0]).max(0.0));
        let pass = defect <= config.exact(1e-10);
        out.push_str(&format!("sample,{id},"));
        push_components(&mut out, &nu.apply(&img.c1)?);
        push_components(&mut out, &nu.apply(&img.c2)?);
        out.push_str(&format!(",{},{pass}\n", fmt(defect)));
        images.push(img);
    }

    // Convexity witnesses over random pairs of the sampled images.
    let t_grid = [0.0, 0.25, 0.5, 0.75, 1.0];
    let n_pairs = grid.max(1);
    let s = salt("moment_image_witness");
    for p in 0..n_pairs {
        let mut rng = Rng::for_sample(config.seed, s, p as u64);
        let a = &images[(rng.next_u64() as usize) % images.len()];
        let b = &images[(rng.next_u64() as usize) % images.len()];
        for (k, &t) in t_grid.iter().enumerate() {
            let id = p * t_grid.len() + k;
            let (_, check) = convexity_witness(a, b, t)?;
            let mix = a
                .c1
                .scale(C64::new(t, 0.0))
                .add(&b.c1.scale(C64::new(1.0 - t, 0.0)));
            let defect = check
                .c1
                .norm_diff(&mix)
                .max(check.c2.norm_diff(&one.sub(&mix)));
            let pass = defect <= config.exact(1e-9);
            out.push_str(&format!("witness,{id},{t}"));
            push_components(&mut out, &nu.apply(&check.c1)?);
            push_components(&mut out, &nu.apply(&check.c2)?);
            out.push_str(&format!(",{},{pass}\n", fmt(defect)));
        }
    }
    Ok(out)
}
