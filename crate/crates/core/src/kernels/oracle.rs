//! Brute-force four-dimensional quadrature, used to certify the closed forms.
//!
//! The outer integral over `Ii` is a tensor Gauss rule on cells that are
//! halved toward the edges and corners of `Ij` up to `depth` levels, across
//! an edge line only when the edge runs parallel to the cell. The inner
//! integral over `Ij` runs over the triangles joining the projection of `x`
//! to the edges of `Ij`, with Gauss rules graded toward the projection.

use alloc::vec::Vec;
use core::f64::consts::PI;

// needed when std is absent from the build graph
#[allow(unused_imports)]
use num_traits::Float;

use super::quadrature::gauss_legendre;
use super::KernelKind;
use crate::geometry::{box_distance, Interval, Point, Rect};

const OUTER_ORDER: usize = 8;
const INNER_ORDER: usize = 10;
const NEAR: f64 = 1.0;

/// Brute-force `int_{Ii} int_{Ij} k(x, y)` for the single-layer
/// (`1 / (4 pi |x - y|)`) or double-layer kernel with the normal of `Ij`.
pub fn oracle_pair_integral(kind: KernelKind, ii: &Rect, ij: &Rect, depth: u32) -> f64 {
    let o = Oracle {
        kind,
        ij,
        outer: gauss_legendre(OUTER_ORDER),
        inner: gauss_legendre(INNER_ORDER),
        edges: edge_boxes(ij),
        corners: corner_boxes(ij),
        depth: depth.max(1),
    };
    let sum: f64 = initial_cells(ii, ij).iter().map(|c| o.cell(c, 0)).sum();
    sum * 0.25 / PI
}

struct Oracle<'a> {
    kind: KernelKind,
    ij: &'a Rect,
    outer: Vec<(f64, f64)>,
    inner: Vec<(f64, f64)>,
    edges: [[Interval; 3]; 4],
    corners: [[Interval; 3]; 4],
    depth: u32,
}

fn edge_boxes(r: &Rect) -> [[Interval; 3]; 4] {
    let (a, b) = r.axis.others();
    let s = r.spans();
    let mut out = [s; 4];
    out[0][a.index()] = Interval::point(r.span_a.lo);
    out[1][a.index()] = Interval::point(r.span_a.hi);
    out[2][b.index()] = Interval::point(r.span_b.lo);
    out[3][b.index()] = Interval::point(r.span_b.hi);
    out
}

fn corner_boxes(r: &Rect) -> [[Interval; 3]; 4] {
    let (a, b) = r.axis.others();
    let s = r.spans();
    let mut out = [s; 4];
    for (k, (x, y)) in [
        (r.span_a.lo, r.span_b.lo),
        (r.span_a.hi, r.span_b.lo),
        (r.span_a.lo, r.span_b.hi),
        (r.span_a.hi, r.span_b.hi),
    ]
    .into_iter()
    .enumerate()
    {
        out[k][a.index()] = Interval::point(x);
        out[k][b.index()] = Interval::point(y);
    }
    out
}

/// `Ii` split where the edges or the plane of `Ij` project onto it.
fn initial_cells(ii: &Rect, ij: &Rect) -> Vec<Rect> {
    let (a, b) = ii.axis.others();
    let cuts = |span: Interval, other: Interval| {
        let mut v = Vec::with_capacity(4);
        v.push(span.lo);
        for x in [other.lo, other.hi] {
            if span.lo < x && x < span.hi && !v.contains(&x) {
                v.push(x);
            }
        }
        v.push(span.hi);
        v.sort_by(f64::total_cmp);
        v
    };
    let ca = cuts(ii.span_a, ij.span(a));
    let cb = cuts(ii.span_b, ij.span(b));
    let mut cells = Vec::new();
    for wa in ca.windows(2) {
        for wb in cb.windows(2) {
            cells.push(Rect {
                span_a: Interval::new(wa[0], wa[1]),
                span_b: Interval::new(wb[0], wb[1]),
                ..*ii
            });
        }
    }
    cells
}

impl Oracle<'_> {
    fn cell(&self, c: &Rect, level: u32) -> f64 {
        if level < self.depth {
            let (split_a, split_b) = self.split_directions(c);
            if split_a || split_b {
                let halves = |s: Interval, split: bool| {
                    if split {
                        let m = s.mid();
                        [Some(Interval::new(s.lo, m)), Some(Interval::new(m, s.hi))]
                    } else {
                        [Some(s), None]
                    }
                };
                let mut sum = 0.0;
                for sa in halves(c.span_a, split_a).into_iter().flatten() {
                    for sb in halves(c.span_b, split_b).into_iter().flatten() {
                        let sub = Rect {
                            span_a: sa,
                            span_b: sb,
                            ..*c
                        };
                        sum += self.cell(&sub, level + 1);
                    }
                }
                return sum;
            }
        }
        let (a, b) = c.axis.others();
        let (ha, hb) = (0.5 * c.span_a.len(), 0.5 * c.span_b.len());
        let mut sum = 0.0;
        for &(xa, wa) in &self.outer {
            for &(xb, wb) in &self.outer {
                let mut x: Point = [0.0; 3];
                x[c.axis.index()] = c.level;
                x[a.index()] = c.span_a.mid() + ha * xa;
                x[b.index()] = c.span_b.mid() + hb * xb;
                sum += wa * wb * self.inner_integral(x);
            }
        }
        sum * ha * hb
    }

    /// Which in-plane sides of `c` to halve. An edge of `Ij` whose line
    /// runs parallel to the cell only forces splits across it; corners and
    /// edges that pierce the plane of the cell force splits in both
    /// directions.
    fn split_directions(&self, c: &Rect) -> (bool, bool) {
        let spans = c.spans();
        let (a, b) = c.axis.others();
        let (wa, wb) = (c.span_a.len(), c.span_b.len());
        let near_point = |p: &[Interval; 3]| box_distance(&spans, p) < NEAR * c.diameter();
        if self.corners.iter().any(near_point) {
            return (true, true);
        }
        let (mut sa, mut sb) = (false, false);
        for e in &self.edges {
            let dist = box_distance(&spans, e);
            let along = (0..3).find(|&k| e[k].len() > 0.0);
            match along {
                Some(k) if k == a.index() => sb |= dist < NEAR * wb,
                Some(k) if k == b.index() => sa |= dist < NEAR * wa,
                _ => {
                    if dist < NEAR * c.diameter() {
                        return (true, true);
                    }
                }
            }
        }
        (sa, sb)
    }

    /// `int_{Ij} k(x, y) dy` without the `1 / (4 pi)` factor.
    ///
    /// The rectangle is the signed sum of the four triangles joining the
    /// projection of `x` to its edges. Each triangle is parametrised by the
    /// position `s` along its edge and a radial fraction; the radial
    /// integral is elementary and `s` is integrated by graded Gauss rules.
    fn inner_integral(&self, x: Point) -> f64 {
        let ij = self.ij;
        let (a, b) = ij.axis.others();
        let h = x[ij.axis.index()] - ij.level;
        if self.kind == KernelKind::DoubleLayerQ && h == 0.0 {
            return 0.0;
        }
        let (xa, xb) = (x[a.index()], x[b.index()]);
        let (ra, rb) = (ij.span_a, ij.span_b);
        let edges = [
            (ra.hi - xa, rb.lo - xb, rb.hi - xb),
            (xa - ra.lo, rb.lo - xb, rb.hi - xb),
            (rb.hi - xb, ra.lo - xa, ra.hi - xa),
            (xb - rb.lo, ra.lo - xa, ra.hi - xa),
        ];
        let h = h.abs();
        let mut sum = 0.0;
        for (d, s0, s1) in edges {
            if d == 0.0 {
                continue;
            }
            let ad = d.abs();
            let radial = |s: f64| {
                let r = (ad * ad + s * s + h * h).sqrt();
                match self.kind {
                    KernelKind::SingleLayerU => ad / (r + h),
                    KernelKind::DoubleLayerQ => ad / (r * (r + h)),
                }
            };
            let scale = ad.hypot(h);
            let mut part = 0.0;
            if s0 < 0.0 {
                part += self.graded(s1.min(0.0).abs(), -s0, scale, |t| radial(-t));
            }
            if s1 > 0.0 {
                part += self.graded(s0.max(0.0), s1, scale, radial);
            }
            sum += d.signum() * part;
        }
        match self.kind {
            KernelKind::SingleLayerU => sum,
            KernelKind::DoubleLayerQ => ij.normal_sign * (x[ij.axis.index()] - ij.level).signum() * sum,
        }
    }

    /// Gauss rule on `[lo, hi]`, `0 <= lo`, with pieces growing
    /// geometrically away from the origin where `g` varies on `scale`.
    fn graded(&self, lo: f64, hi: f64, scale: f64, g: impl Fn(f64) -> f64) -> f64 {
        let mut sum = 0.0;
        let mut t0 = lo;
        while t0 < hi {
            let t1 = (2.0 * t0).max(t0 + scale).min(hi);
            let t1 = if hi - t1 < 0.5 * (t1 - t0) { hi } else { t1 };
            let (hw, m) = (0.5 * (t1 - t0), 0.5 * (t1 + t0));
            sum += hw * self.inner.iter().map(|&(x, w)| w * g(m + hw * x)).sum::<f64>();
            t0 = t1;
        }
        sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Axis;

    fn sq(axis: Axis, level: f64, a: (f64, f64), b: (f64, f64)) -> Rect {
        Rect::new(axis, level, Interval::new(a.0, a.1), Interval::new(b.0, b.1), 1.0).unwrap()
    }

    #[test]
    fn distant_panels_are_depth_independent() {
        let a = sq(Axis::Z, 0.0, (0.0, 1.0), (0.0, 1.0));
        let b = sq(Axis::X, 7.0, (2.0, 3.0), (4.0, 5.0));
        for kind in [KernelKind::SingleLayerU, KernelKind::DoubleLayerQ] {
            let v3 = oracle_pair_integral(kind, &a, &b, 3);
            let v4 = oracle_pair_integral(kind, &a, &b, 4);
            assert!(((v3 - v4) / v4).abs() <= 1e-10);
        }
    }

    #[test]
    fn coplanar_double_layer_vanishes() {
        let a = sq(Axis::Y, 1.0, (0.0, 1.0), (0.0, 1.0));
        let b = sq(Axis::Y, 1.0, (1.0, 3.0), (-1.0, 0.5));
        assert!(oracle_pair_integral(KernelKind::DoubleLayerQ, &a, &b, 3).abs() <= 1e-12);
    }

    #[test]
    fn self_integral_is_cauchy_in_depth() {
        let exact = (4.0 * (1.0 + 2.0f64.sqrt()).ln() - 4.0 / 3.0 * (2.0f64.sqrt() - 1.0)) * 0.25 / PI;
        let a = sq(Axis::Z, 0.0, (0.0, 1.0), (0.0, 1.0));
        let vals: Vec<f64> = (2..=6)
            .map(|d| oracle_pair_integral(KernelKind::SingleLayerU, &a, &a, d))
            .collect();
        let diffs: Vec<f64> = vals.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        for w in diffs.windows(2) {
            assert!(w[1] <= 0.5 * w[0], "{:?}", diffs);
        }
        assert!(((vals[4] - exact) / exact).abs() < 1e-4, "{:?} {}", vals, exact);
    }
}
