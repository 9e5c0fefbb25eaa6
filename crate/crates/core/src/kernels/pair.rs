//! Panel-pair integrals of the single- and double-layer kernels.
//!
//! Every case reduces the four-fold integral with closed-form
//! antiderivatives. Coplanar pairs are fully analytic; offset-parallel and
//! orthogonal pairs keep one Romberg integral over a difference variable.

use core::f64::consts::PI;

// needed when std is absent from the build graph
#[allow(unused_imports)]
use num_traits::Float;

use super::quadrature::{diff_apply, integrate_pieces, Composite, Estimate, QuadratureConfig};
use super::{KernelKind, KernelValue};
use crate::error::Result;
use crate::geometry::{Axis, Interval, Rect};

const INV_4PI: f64 = 0.25 / PI;

/// `c * g` with the convention `0 * g = 0` for the log and atan singular
/// limits.
#[inline]
fn mul0(c: f64, g: impl FnOnce() -> f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * g()
    }
}

/// Difference-variable corners for `x` in `xi`, `y` in `yj`: the double
/// integral of `f''(x - y)` equals `sum sign * f(corner)`.
#[inline]
fn corners(xi: Interval, yj: Interval) -> [(f64, f64); 4] {
    [
        (xi.hi - yj.lo, 1.0),
        (xi.lo - yj.hi, 1.0),
        (xi.hi - yj.hi, -1.0),
        (xi.lo - yj.lo, -1.0),
    ]
}

/// Overlap length of `x - t` windows: the weight of `g(x - y)` after the
/// change of variables `t = x - y`.
#[inline]
fn trapezoid(xi: Interval, yj: Interval, t: f64) -> f64 {
    (xi.hi.min(yj.hi + t) - xi.lo.max(yj.lo + t)).max(0.0)
}

/// Fourth antiderivative of `1/sqrt(s^2 + t^2)`, twice in each variable.
fn coplanar_f(s: f64, t: f64) -> f64 {
    let (s, t) = (s.abs(), t.abs());
    let r = s.hypot(t);
    mul0(0.5 * t * t * s, || (s / t).asinh()) + mul0(0.5 * s * s * t, || (t / s).asinh()) - r * r * r / 6.0
}

/// Second antiderivative in `s` of `1/sqrt(s^2 + rho^2)`, `rho > 0`.
#[inline]
fn h_single(s: f64, rho: f64) -> f64 {
    s * (s / rho).asinh() - s.hypot(rho)
}

/// Antiderivative in `beta` of `h_single(s, sqrt(alpha^2 + beta^2))`.
fn k_orth(s: f64, alpha: f64, beta: f64) -> f64 {
    let rho = alpha.hypot(beta);
    let r = s.hypot(rho);
    let sa = s.hypot(alpha);
    mul0(s * beta, || (s / rho).asinh()) + mul0(0.5 * (s * s - alpha * alpha), || (beta / sa).asinh())
        - mul0(s * alpha, || (s * beta / (alpha * r)).atan())
        - 0.5 * beta * r
}

/// `alpha` times the antiderivative in `beta` of `R / rho^2`, the second
/// `s`-antiderivative of `r^-3`. `side` is the sign of `alpha`, which fixes
/// the one-sided limit at `alpha = 0`.
fn m_orth(s: f64, alpha: f64, beta: f64, side: f64) -> f64 {
    let r = s.hypot(alpha.hypot(beta));
    let sa = s.hypot(alpha);
    mul0(alpha, || (beta / sa).asinh()) + mul0(s, || (side * s * beta).atan2(alpha.abs() * r))
}

fn magnitude(ii: &Rect, ij: &Rect) -> f64 {
    let d = ii.distance_to_rect(ij) + 0.5 * (ii.diameter() + ij.diameter());
    ii.area() * ij.area() / d
}

/// `int_{Ii} int_{Ij} 1 / (4 pi |x - y|)`.
pub fn u_pair_integral(ii: &Rect, ij: &Rect, cfg: &QuadratureConfig) -> Result<KernelValue> {
    cfg.validate()?;
    let est = if ii.axis == ij.axis {
        let z = ii.level - ij.level;
        if z == 0.0 {
            u_coplanar(ii, ij)?
        } else {
            u_offset(ii, ij, z, cfg)?
        }
    } else {
        u_orthogonal(ii, ij, cfg)?
    };
    Ok(KernelValue {
        value: est.value * INV_4PI,
        kind: KernelKind::SingleLayerU,
        converged: est.converged,
    })
}

/// `int_{Ii} int_{Ij} <x - y, n_y> / (4 pi |x - y|^3)` with `n_y` the normal
/// of `Ij`.
pub fn q_pair_integral(ii: &Rect, ij: &Rect, cfg: &QuadratureConfig) -> Result<KernelValue> {
    cfg.validate()?;
    let est = if ii.axis == ij.axis {
        let z = ii.level - ij.level;
        if z == 0.0 {
            Estimate {
                value: 0.0,
                converged: true,
                evals: 0,
            }
        } else {
            q_offset(ii, ij, z, cfg)?
        }
    } else {
        q_orthogonal(ii, ij, cfg)?
    };
    Ok(KernelValue {
        value: est.value * INV_4PI,
        kind: KernelKind::DoubleLayerQ,
        converged: est.converged,
    })
}

fn u_coplanar(ii: &Rect, ij: &Rect) -> Result<Estimate> {
    let value = diff_apply(
        |v| coplanar_f(v[0] + v[2], v[1] + v[3]),
        &[
            (ii.span_a.hi, ii.span_a.lo),
            (ii.span_b.hi, ii.span_b.lo),
            (-ij.span_a.lo, -ij.span_a.hi),
            (-ij.span_b.lo, -ij.span_b.hi),
        ],
    )?;
    Ok(Estimate {
        value,
        converged: true,
        evals: 0,
    })
}

/// Parallel planes at offset `z`: closed form along `span_a`, one Romberg
/// integral over `t = x_b - y_b`.
fn u_offset(ii: &Rect, ij: &Rect, z: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    let cs = corners(ii.span_a, ij.span_a);
    let (xb, yb) = (ii.span_b, ij.span_b);
    let c = Composite::new(cfg, magnitude(ii, ij));
    integrate_pieces(
        |t| {
            let w = trapezoid(xb, yb, t);
            if w == 0.0 {
                return 0.0;
            }
            let rho = t.hypot(z);
            w * cs.iter().map(|&(s, sg)| sg * h_single(s, rho)).sum::<f64>()
        },
        xb.lo - yb.hi,
        xb.hi - yb.lo,
        &[xb.lo - yb.lo, xb.hi - yb.hi],
        Some((0.0, z.abs())),
        &c,
    )
}

/// `int w(t) / (t^2 + z^2) dt` for the piecewise-linear trapezoid weight,
/// scaled by `z`.
fn trapezoid_lorentz(xb: Interval, yb: Interval, z: f64) -> f64 {
    let mut pts = [xb.lo - yb.hi, xb.lo - yb.lo, xb.hi - yb.hi, xb.hi - yb.lo];
    pts[1..3].sort_by(f64::total_cmp);
    let mut sum = 0.0;
    for k in 0..3 {
        let (t0, t1) = (pts[k], pts[k + 1]);
        if t1 <= t0 {
            continue;
        }
        let (w0, w1) = (trapezoid(xb, yb, t0), trapezoid(xb, yb, t1));
        let m = (w1 - w0) / (t1 - t0);
        let c0 = w0 - m * t0;
        sum += c0 * ((t1 / z).atan() - (t0 / z).atan())
            + 0.5 * z * m * ((t1 * t1 + z * z) / (t0 * t0 + z * z)).ln();
    }
    sum
}

fn q_offset(ii: &Rect, ij: &Rect, z: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    let cs = corners(ii.span_a, ij.span_a);
    let (xb, yb) = (ii.span_b, ij.span_b);
    // R / rho^2 = |s| / rho^2 + 1 / (R + |s|); the first part integrates in
    // closed form against the trapezoid weight.
    let linear: f64 = cs.iter().map(|&(s, sg)| sg * s.abs()).sum();
    let lorentz = if linear == 0.0 {
        0.0
    } else {
        linear * trapezoid_lorentz(xb, yb, z)
    };
    let d = ii.distance_to_rect(ij) + 0.5 * (ii.diameter() + ij.diameter());
    let c = Composite::new(cfg, ii.area() * ij.area() / (d * d));
    let rest = integrate_pieces(
        |t| {
            let w = trapezoid(xb, yb, t);
            if w == 0.0 {
                return 0.0;
            }
            let rho = t.hypot(z);
            let sum: f64 = cs
                .iter()
                .map(|&(s, sg)| sg / (s.hypot(rho) + s.abs()))
                .sum();
            w * z * sum
        },
        xb.lo - yb.hi,
        xb.hi - yb.lo,
        &[xb.lo - yb.lo, xb.hi - yb.hi],
        Some((0.0, z.abs())),
        &c,
    )?;
    Ok(Estimate {
        value: ij.normal_sign * (lorentz + rest.value),
        ..rest
    })
}

/// Coordinates of an orthogonal pair: `alpha = x_kj - c_j` over `Ii`,
/// `beta = c_i - y_ki` over `Ij`, `s = x_k - y_k` along the shared axis.
struct Orth {
    alpha: Interval,
    beta: Interval,
    cs: [(f64, f64); 4],
    eta: f64,
}

impl Orth {
    fn new(ii: &Rect, ij: &Rect) -> Orth {
        let (ki, kj) = (ii.axis, ij.axis);
        let k: Axis = ki.third(kj);
        let xa = ii.span(kj);
        let yb = ij.span(ki);
        let alpha = Interval::new(xa.lo - ij.level, xa.hi - ij.level);
        let beta = Interval::new(ii.level - yb.hi, ii.level - yb.lo);
        let cs = corners(ii.span(k), ij.span(k));
        let bgap = beta.gap(&Interval::point(0.0));
        let sgap = ii.span(k).gap(&ij.span(k));
        Orth {
            alpha,
            beta,
            cs,
            eta: bgap.hypot(sgap),
        }
    }
}

fn u_orthogonal(ii: &Rect, ij: &Rect, cfg: &QuadratureConfig) -> Result<Estimate> {
    let o = Orth::new(ii, ij);
    let c = Composite::new(cfg, magnitude(ii, ij));
    let (b0, b1) = (o.beta.lo, o.beta.hi);
    integrate_pieces(
        |a| {
            o.cs
                .iter()
                .map(|&(s, sg)| sg * (k_orth(s, a, b1) - k_orth(s, a, b0)))
                .sum()
        },
        o.alpha.lo,
        o.alpha.hi,
        &[],
        Some((0.0, o.eta)),
        &c,
    )
}

fn q_orthogonal(ii: &Rect, ij: &Rect, cfg: &QuadratureConfig) -> Result<Estimate> {
    let o = Orth::new(ii, ij);
    let d = ii.distance_to_rect(ij) + 0.5 * (ii.diameter() + ij.diameter());
    let c = Composite::new(cfg, ii.area() * ij.area() / (d * d));
    let (b0, b1) = (o.beta.lo, o.beta.hi);
    let side_integral = |lo: f64, hi: f64, side: f64| {
        integrate_pieces(
            |a| {
                o.cs
                    .iter()
                    .map(|&(s, sg)| sg * (m_orth(s, a, b1, side) - m_orth(s, a, b0, side)))
                    .sum()
            },
            lo,
            hi,
            &[],
            Some((0.0, o.eta)),
            &c,
        )
    };
    let mut est = Estimate {
        value: 0.0,
        converged: true,
        evals: 0,
    };
    if o.alpha.lo < 0.0 {
        let e = side_integral(o.alpha.lo, o.alpha.hi.min(0.0), -1.0)?;
        est.value += e.value;
        est.converged &= e.converged;
        est.evals += e.evals;
    }
    if o.alpha.hi > 0.0 {
        let e = side_integral(o.alpha.lo.max(0.0), o.alpha.hi, 1.0)?;
        est.value += e.value;
        est.converged &= e.converged;
        est.evals += e.evals;
    }
    est.value *= ij.normal_sign;
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq(axis: Axis, level: f64, a: (f64, f64), b: (f64, f64)) -> Rect {
        Rect::new(axis, level, Interval::new(a.0, a.1), Interval::new(b.0, b.1), 1.0).unwrap()
    }

    #[test]
    fn unit_square_self_integral() {
        let r = sq(Axis::Z, 0.0, (0.0, 1.0), (0.0, 1.0));
        let v = u_pair_integral(&r, &r, &QuadratureConfig::default()).unwrap();
        let exact = 4.0 * (1.0 + 2.0f64.sqrt()).ln() - 4.0 / 3.0 * (2.0f64.sqrt() - 1.0);
        assert!((v.value / INV_4PI - exact).abs() < 1e-12, "{}", v.value / INV_4PI);
    }

    #[test]
    fn coplanar_q_is_zero() {
        let a = sq(Axis::Z, 0.0, (0.0, 1.0), (0.0, 1.0));
        let b = sq(Axis::Z, 0.0, (1.0, 2.0), (0.0, 1.0));
        assert_eq!(q_pair_integral(&a, &b, &QuadratureConfig::default()).unwrap().value, 0.0);
    }

    #[test]
    fn offset_q_near_plane_approaches_half_solid_angle() {
        // a small panel just above a large one sees nearly a half space
        let cfg = QuadratureConfig::default();
        let big = sq(Axis::Z, 0.0, (-50.0, 50.0), (-50.0, 50.0));
        let small = sq(Axis::Z, 1e-3, (-0.5, 0.5), (-0.5, 0.5));
        let q = q_pair_integral(&small, &big, &cfg).unwrap();
        assert!((q.value - 0.5).abs() < 1e-2, "{}", q.value);
    }
}
