//! Property tests over arbitrary (not seed-derived) inputs.

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use opdisk::algebra::{fun_calc, Algebra, AlgebraElement, SpectralFn, Valuation};
use opdisk::disk::{disk_coords, disk_point, projection_defect, q_from_b, section};
use opdisk::doubled::{sharp, theta, DoubledMatrix, DoubledVector};

fn c64() -> impl Strategy<Value = Complex64> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn mat(n: usize) -> impl Strategy<Value = AlgebraElement> {
    prop::collection::vec(c64(), n * n).prop_map(move |entries| {
        AlgebraElement::from_dense(n, DMatrix::from_vec(n, n, entries))
    })
}

fn doubled_mat(n: usize) -> impl Strategy<Value = DoubledMatrix> {
    (mat(n), mat(n), mat(n), mat(n)).prop_map(|(a, b, c, d)| DoubledMatrix::new(a, b, c, d))
}

proptest! {
    #[test]
    fn c_star_identity(a in mat(3)) {
        let lhs = a.adjoint().mul(&a).op_norm();
        let rhs = a.op_norm() * a.op_norm();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.max(1e-30));
    }

    #[test]
    fn theta_is_hermitian(x1 in mat(2), x2 in mat(2), y1 in mat(2), y2 in mat(2)) {
        let x = DoubledVector::new(x1, x2);
        let y = DoubledVector::new(y1, y2);
        let xy = theta(&x, &y).unwrap();
        let yx = theta(&y, &x).unwrap();
        prop_assert!(xy.adjoint().norm_diff(&yx) <= 1e-12 * xy.op_norm().max(1.0));
    }

    #[test]
    fn sharp_is_an_involutive_antiautomorphism(m in doubled_mat(2), n in doubled_mat(2)) {
        let back = sharp(&sharp(&m));
        prop_assert!(back.norm_diff(&m) <= 1e-12 * m.op_norm().max(1.0));
        let lhs = sharp(&m.mul(&n));
        let rhs = sharp(&n).mul(&sharp(&m));
        prop_assert!(lhs.norm_diff(&rhs) <= 1e-11 * lhs.op_norm().max(1.0));
    }

    #[test]
    fn square_root_of_shifted_gram_roundtrips(g in mat(3)) {
        let one = AlgebraElement::one(Algebra::Matrix(3));
        let p = one.add(&g.adjoint().mul(&g));
        let s = fun_calc(&p, SpectralFn::Sqrt).unwrap();
        prop_assert!(s.mul(&s).norm_diff(&p) <= 1e-10 * p.op_norm());
        prop_assert!(s.hermitian_defect() <= 1e-12 * s.op_norm());
    }

    #[test]
    fn every_parameter_gives_a_valid_projection(b in mat(3)) {
        let q = q_from_b(&b);
        prop_assert!(projection_defect(q.matrix()) <= 1e-9);
        let x = section(&q).unwrap();
        let one = AlgebraElement::one(Algebra::Matrix(3));
        prop_assert!(theta(x.vector(), x.vector()).unwrap().norm_diff(&one) <= 1e-9);
        // Coordinates land strictly inside the disk and invert.
        let z = disk_coords(&q).unwrap();
        prop_assert!(z.op_norm() < 1.0);
        prop_assert!(disk_point(&z).unwrap().norm_diff(&q) <= 1e-8);
    }

    #[test]
    fn valuation_is_tracial(a in mat(3), b in mat(3)) {
        let nu = Valuation::canonical(Algebra::Matrix(3));
        let ab = nu.apply(&a.mul(&b)).unwrap();
        let ba = nu.apply(&b.mul(&a)).unwrap();
        prop_assert!(ab.norm_diff(&ba) <= 1e-11 * ab.op_norm().max(1.0));
    }
}
