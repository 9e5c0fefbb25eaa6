//! Point-to-panel integrals used by the collocation baseline.

use core::f64::consts::PI;

// needed when std is absent from the build graph
#[allow(unused_imports)]
use num_traits::Float;

use super::quadrature::diff_apply;
use crate::error::Result;
use crate::geometry::{Point, Rect};

fn local(x: Point, ij: &Rect) -> ([(f64, f64); 2], f64) {
    let (a, b) = ij.axis.others();
    let (xa, xb) = (x[a.index()], x[b.index()]);
    (
        [
            (ij.span_a.hi - xa, ij.span_a.lo - xa),
            (ij.span_b.hi - xb, ij.span_b.lo - xb),
        ],
        x[ij.axis.index()] - ij.level,
    )
}

/// `int_{Ij} 1 / (4 pi |x - y|) dy`.
pub fn u_point_integral(x: Point, ij: &Rect) -> Result<f64> {
    let (bounds, z) = local(x, ij);
    let z = z.abs();
    let v = diff_apply(
        |c| {
            let (u, v) = (c[0], c[1]);
            let r = u.hypot(v).hypot(z);
            let mut p = 0.0;
            if u != 0.0 {
                p += u * (v / u.hypot(z)).asinh();
            }
            if v != 0.0 {
                p += v * (u / v.hypot(z)).asinh();
            }
            if z != 0.0 {
                p -= z * (u * v / (z * r)).atan();
            }
            p
        },
        &bounds,
    )?;
    Ok(v * 0.25 / PI)
}

/// `int_{Ij} <x - y, n_y> / (4 pi |x - y|^3) dy`; zero when `x` lies in the
/// plane of `Ij`.
pub fn q_point_integral(x: Point, ij: &Rect) -> Result<f64> {
    let (bounds, z) = local(x, ij);
    if z == 0.0 {
        return Ok(0.0);
    }
    let v = diff_apply(
        |c| {
            let (u, v) = (c[0], c[1]);
            let r = u.hypot(v).hypot(z);
            (u * v / (z * r)).atan()
        },
        &bounds,
    )?;
    Ok(ij.normal_sign * v * 0.25 / PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Axis, Interval};

    #[test]
    fn centre_of_unit_square() {
        let r = Rect::new(Axis::Z, 0.0, Interval::new(-0.5, 0.5), Interval::new(-0.5, 0.5), 1.0).unwrap();
        // 4 ln(1 + sqrt 2) for the unit square seen from its centre
        let u = u_point_integral([0.0, 0.0, 0.0], &r).unwrap() * 4.0 * PI;
        assert!((u - 4.0 * (1.0 + 2.0f64.sqrt()).ln()).abs() < 1e-14);
        assert_eq!(q_point_integral([0.0, 0.0, 0.0], &r).unwrap(), 0.0);
        // a point just above sees half the full solid angle
        let q = q_point_integral([0.0, 0.0, 1e-9], &r).unwrap();
        assert!((q - 0.5).abs() < 1e-8);
        let q = q_point_integral([0.0, 0.0, -1e-9], &r).unwrap();
        assert!((q + 0.5).abs() < 1e-8);
    }
}
