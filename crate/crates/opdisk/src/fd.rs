//! Central finite differences with one Richardson refinement.

use crate::algebra::{AlgebraElement, C64};
use crate::doubled::{DoubledMatrix, DoubledVector};

/// Default step for all finite differences.
pub const FD_STEP: f64 = 1e-4;

/// Two-term real-linear combination, the only structure differencing needs.
pub trait LinearData: Sized {
    fn combine(a: &Self, ca: f64, b: &Self, cb: f64) -> Self;
}

impl LinearData for AlgebraElement {
    fn combine(a: &Self, ca: f64, b: &Self, cb: f64) -> Self {
        a.scale(C64::new(ca, 0.0)).add(&b.scale(C64::new(cb, 0.0)))
    }
}

impl LinearData for DoubledVector {
    fn combine(a: &Self, ca: f64, b: &Self, cb: f64) -> Self {
        a.scale(C64::new(ca, 0.0)).add(&b.scale(C64::new(cb, 0.0)))
    }
}

impl LinearData for DoubledMatrix {
    fn combine(a: &Self, ca: f64, b: &Self, cb: f64) -> Self {
        a.scale(C64::new(ca, 0.0)).add(&b.scale(C64::new(cb, 0.0)))
    }
}

fn central<V: LinearData>(f: &impl Fn(f64) -> V, t0: f64, h: f64) -> V {
    let plus = f(t0 + h);
    let minus = f(t0 - h);
    V::combine(&plus, 1.0 / (2.0 * h), &minus, -1.0 / (2.0 * h))
}

/// d/dt f at t0: central differences at steps h and h/2, Richardson-combined
/// to fourth order.
pub fn derivative<V: LinearData>(f: impl Fn(f64) -> V, t0: f64, h: f64) -> V {
    let coarse = central(&f, t0, h);
    let fine = central(&f, t0, h / 2.0);
    V::combine(&fine, 4.0 / 3.0, &coarse, -1.0 / 3.0)
}
