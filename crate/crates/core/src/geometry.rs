//! Axis-aligned scene model: cuboid conductors inside box-shaped dielectric
//! regions that tile a rectangular domain.
//!
//! Boundary face normals follow one convention throughout the crate:
//! conductor faces point out of the conductor, outer faces point into the
//! domain, and interface faces point from the lower region id into the higher
//! one.

use alloc::format;
use alloc::vec::Vec;

// needed when std is absent from the build graph
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

pub type Point = [f64; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i % 3]
    }

    /// The two remaining axes in ascending index order.
    pub fn others(self) -> (Axis, Axis) {
        match self {
            Axis::X => (Axis::Y, Axis::Z),
            Axis::Y => (Axis::X, Axis::Z),
            Axis::Z => (Axis::X, Axis::Y),
        }
    }

    /// The axis orthogonal to both `self` and `other` (which must differ).
    pub fn third(self, other: Axis) -> Axis {
        Axis::from_index(3 - self.index() - other.index())
    }
}

/// Closed interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Gap between the intervals, zero when they overlap or touch.
    pub fn gap(&self, other: &Interval) -> f64 {
        (other.lo - self.hi).max(self.lo - other.hi).max(0.0)
    }

    /// Length of the overlap, zero when disjoint.
    pub fn overlap(&self, other: &Interval) -> f64 {
        (self.hi.min(other.hi) - self.lo.max(other.lo)).max(0.0)
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (hi > lo).then_some(Interval { lo, hi })
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.max(self.lo).min(self.hi)
    }
}

pub(crate) fn box_distance(a: &[Interval; 3], b: &[Interval; 3]) -> f64 {
    let mut d2 = 0.0;
    for k in 0..3 {
        let g = a[k].gap(&b[k]);
        d2 += g * g;
    }
    d2.sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cuboid {
    pub lo: Point,
    pub hi: Point,
}

impl Cuboid {
    pub fn new(lo: Point, hi: Point) -> Result<Self> {
        for k in 0..3 {
            if !(lo[k].is_finite() && hi[k].is_finite()) || lo[k] >= hi[k] {
                return Err(Error::InvalidCuboid(format!(
                    "lo {:?} must be strictly below hi {:?}",
                    lo, hi
                )));
            }
        }
        Ok(Cuboid { lo, hi })
    }

    pub fn span(&self, axis: Axis) -> Interval {
        let k = axis.index();
        Interval::new(self.lo[k], self.hi[k])
    }

    pub fn spans(&self) -> [Interval; 3] {
        [self.span(Axis::X), self.span(Axis::Y), self.span(Axis::Z)]
    }

    pub fn volume(&self) -> f64 {
        (self.hi[0] - self.lo[0]) * (self.hi[1] - self.lo[1]) * (self.hi[2] - self.lo[2])
    }

    pub fn center(&self) -> Point {
        [
            0.5 * (self.lo[0] + self.hi[0]),
            0.5 * (self.lo[1] + self.hi[1]),
            0.5 * (self.lo[2] + self.hi[2]),
        ]
    }

    pub fn translated(&self, offset: Point) -> Cuboid {
        Cuboid {
            lo: add(self.lo, offset),
            hi: add(self.hi, offset),
        }
    }

    /// True when the open interiors intersect.
    pub fn overlaps(&self, other: &Cuboid) -> bool {
        (0..3).all(|k| self.lo[k] < other.hi[k] && other.lo[k] < self.hi[k])
    }

    /// True when the closed boxes intersect (touching counts).
    pub fn meets(&self, other: &Cuboid) -> bool {
        (0..3).all(|k| self.lo[k] <= other.hi[k] && other.lo[k] <= self.hi[k])
    }

    pub fn contains_box(&self, other: &Cuboid) -> bool {
        (0..3).all(|k| self.lo[k] <= other.lo[k] && other.hi[k] <= self.hi[k])
    }

    pub fn strictly_contains(&self, other: &Cuboid) -> bool {
        (0..3).all(|k| self.lo[k] < other.lo[k] && other.hi[k] < self.hi[k])
    }

    /// The six faces with outward normals, ordered -x, +x, -y, +y, -z, +z.
    pub fn faces(&self) -> [Rect; 6] {
        let mk = |axis: Axis, side: usize| {
            let (a, b) = axis.others();
            let k = axis.index();
            Rect {
                axis,
                level: if side == 0 { self.lo[k] } else { self.hi[k] },
                span_a: self.span(a),
                span_b: self.span(b),
                normal_sign: if side == 0 { -1.0 } else { 1.0 },
            }
        };
        [
            mk(Axis::X, 0),
            mk(Axis::X, 1),
            mk(Axis::Y, 0),
            mk(Axis::Y, 1),
            mk(Axis::Z, 0),
            mk(Axis::Z, 1),
        ]
    }

    pub fn distance_to_rect(&self, rect: &Rect) -> f64 {
        box_distance(&self.spans(), &rect.spans())
    }
}

fn add(p: Point, q: Point) -> Point {
    [p[0] + q[0], p[1] + q[1], p[2] + q[2]]
}

/// Axis-aligned rectangle with constant coordinate `level` along `axis`.
///
/// `span_a` and `span_b` cover the two remaining axes in ascending index
/// order; `normal_sign` orients the normal along `axis`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub axis: Axis,
    pub level: f64,
    pub span_a: Interval,
    pub span_b: Interval,
    pub normal_sign: f64,
}

impl Rect {
    pub fn new(
        axis: Axis,
        level: f64,
        span_a: Interval,
        span_b: Interval,
        normal_sign: f64,
    ) -> Result<Self> {
        if !(span_a.len() > 0.0 && span_b.len() > 0.0) || !level.is_finite() {
            return Err(Error::InvalidCuboid(format!(
                "degenerate rectangle {:?} x {:?}",
                span_a, span_b
            )));
        }
        if normal_sign != 1.0 && normal_sign != -1.0 {
            return Err(Error::InvalidCuboid(format!(
                "normal sign must be +1 or -1, got {}",
                normal_sign
            )));
        }
        Ok(Rect {
            axis,
            level,
            span_a,
            span_b,
            normal_sign,
        })
    }

    pub fn area(&self) -> f64 {
        self.span_a.len() * self.span_b.len()
    }

    /// Extent along any axis; degenerate `[level, level]` along the normal.
    pub fn span(&self, axis: Axis) -> Interval {
        if axis == self.axis {
            return Interval::point(self.level);
        }
        let (a, _) = self.axis.others();
        if axis == a {
            self.span_a
        } else {
            self.span_b
        }
    }

    pub fn spans(&self) -> [Interval; 3] {
        [self.span(Axis::X), self.span(Axis::Y), self.span(Axis::Z)]
    }

    pub fn centroid(&self) -> Point {
        let s = self.spans();
        [s[0].mid(), s[1].mid(), s[2].mid()]
    }

    pub fn normal(&self) -> Point {
        let mut n = [0.0; 3];
        n[self.axis.index()] = self.normal_sign;
        n
    }

    pub fn flipped(&self) -> Rect {
        Rect {
            normal_sign: -self.normal_sign,
            ..*self
        }
    }

    pub fn diameter(&self) -> f64 {
        self.span_a.len().hypot(self.span_b.len())
    }

    /// Longer side over shorter side.
    pub fn aspect(&self) -> f64 {
        let (u, v) = (self.span_a.len(), self.span_b.len());
        u.max(v) / u.min(v)
    }

    pub fn translated(&self, offset: Point) -> Rect {
        let (a, b) = self.axis.others();
        Rect {
            axis: self.axis,
            level: self.level + offset[self.axis.index()],
            span_a: Interval::new(self.span_a.lo + offset[a.index()], self.span_a.hi + offset[a.index()]),
            span_b: Interval::new(self.span_b.lo + offset[b.index()], self.span_b.hi + offset[b.index()]),
            normal_sign: self.normal_sign,
        }
    }

    pub fn distance_to_rect(&self, other: &Rect) -> f64 {
        box_distance(&self.spans(), &other.spans())
    }

    pub fn distance_to_point(&self, p: Point) -> f64 {
        let s = self.spans();
        let mut d2 = 0.0;
        for k in 0..3 {
            let g = (s[k].lo - p[k]).max(p[k] - s[k].hi).max(0.0);
            d2 += g * g;
        }
        d2.sqrt()
    }

    /// Split at `x` along in-plane axis `axis`; `None` when `x` is not interior.
    pub fn split(&self, axis: Axis, x: f64) -> Option<(Rect, Rect)> {
        let (a, _) = self.axis.others();
        let span = self.span(axis);
        if axis == self.axis || !(span.lo < x && x < span.hi) {
            return None;
        }
        let (mut lo, mut hi) = (*self, *self);
        if axis == a {
            lo.span_a.hi = x;
            hi.span_a.lo = x;
        } else {
            lo.span_b.hi = x;
            hi.span_b.lo = x;
        }
        Some((lo, hi))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Conductor {
    pub net: u32,
    pub cuboids: Vec<Cuboid>,
}

impl Conductor {
    pub fn new(net: u32, cuboids: Vec<Cuboid>) -> Self {
        Conductor { net, cuboids }
    }

    pub fn bounding_box(&self) -> Cuboid {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for c in &self.cuboids {
            for k in 0..3 {
                lo[k] = lo[k].min(c.lo[k]);
                hi[k] = hi[k].max(c.hi[k]);
            }
        }
        Cuboid { lo, hi }
    }

    pub fn volume(&self) -> f64 {
        self.cuboids.iter().map(Cuboid::volume).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DielectricRegion {
    pub id: u32,
    pub bounds: Cuboid,
    pub rel_permittivity: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OuterBc {
    Dirichlet,
    Neumann,
}

/// Boundary conditions on the six domain faces, indexed like
/// [`Cuboid::faces`]: -x, +x, -y, +y, -z, +z.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OuterBoundary(pub [OuterBc; 6]);

impl OuterBoundary {
    pub fn all_dirichlet() -> Self {
        OuterBoundary([OuterBc::Dirichlet; 6])
    }

    pub fn face_index(axis: Axis, positive: bool) -> usize {
        2 * axis.index() + usize::from(positive)
    }

    pub fn get(&self, axis: Axis, positive: bool) -> OuterBc {
        self.0[Self::face_index(axis, positive)]
    }

    pub fn set(&mut self, axis: Axis, positive: bool, bc: OuterBc) {
        self.0[Self::face_index(axis, positive)] = bc;
    }

    pub fn is_all_dirichlet(&self) -> bool {
        self.0.iter().all(|bc| *bc == OuterBc::Dirichlet)
    }
}

impl Default for OuterBoundary {
    fn default() -> Self {
        Self::all_dirichlet()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FaceKind {
    Conductor(u32),
    DirichletOuter,
    NeumannOuter,
    /// Shared rectangle of regions `a < b`; the normal points from `a` into `b`.
    Interface { a: u32, b: u32 },
}

impl FaceKind {
    /// Faces whose potential is prescribed (conductors and Dirichlet walls).
    pub fn is_dirichlet_like(&self) -> bool {
        matches!(self, FaceKind::Conductor(_) | FaceKind::DirichletOuter)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryFace {
    pub rect: Rect,
    pub kind: FaceKind,
    pub owner: u32,
    /// Second owning region, only for interfaces.
    pub other_owner: Option<u32>,
}

impl BoundaryFace {
    /// Sign turning the stored normal into the outward normal of `region`.
    pub fn outward_sign(&self, region: u32) -> f64 {
        match self.kind {
            FaceKind::Interface { a, .. } => {
                if region == a {
                    1.0
                } else {
                    -1.0
                }
            }
            // conductor and outer normals point into the dielectric
            _ => -1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    domain: Cuboid,
    regions: Vec<DielectricRegion>,
    conductors: Vec<Conductor>,
    outer: OuterBoundary,
}

/// Validates and assembles a scene.
///
/// Conductors must sit strictly inside one region and may not touch each
/// other; regions must tile the domain exactly.
pub fn build_scene(
    domain: Cuboid,
    regions: Vec<DielectricRegion>,
    conductors: Vec<Conductor>,
    outer: OuterBoundary,
) -> Result<Scene> {
    Cuboid::new(domain.lo, domain.hi)?;
    if regions.is_empty() {
        return Err(Error::Tiling("no dielectric regions".into()));
    }
    for (i, r) in regions.iter().enumerate() {
        Cuboid::new(r.bounds.lo, r.bounds.hi)?;
        if !(r.rel_permittivity > 0.0 && r.rel_permittivity.is_finite()) {
            return Err(Error::InvalidPermittivity {
                region: r.id,
                value: r.rel_permittivity,
            });
        }
        if regions[..i].iter().any(|q| q.id == r.id) {
            return Err(Error::DuplicateId(format!("region {}", r.id)));
        }
        if !domain.contains_box(&r.bounds) {
            return Err(Error::Tiling(format!("region {} extends outside the domain", r.id)));
        }
        if let Some(q) = regions[..i].iter().find(|q| q.bounds.overlaps(&r.bounds)) {
            return Err(Error::Tiling(format!("regions {} and {} overlap", q.id, r.id)));
        }
    }
    let covered: f64 = regions.iter().map(|r| r.bounds.volume()).sum();
    if (covered - domain.volume()).abs() > 1e-9 * domain.volume() {
        return Err(Error::Tiling(format!(
            "region volumes sum to {} but the domain volume is {}",
            covered,
            domain.volume()
        )));
    }

    for (i, c) in conductors.iter().enumerate() {
        if conductors[..i].iter().any(|d| d.net == c.net) {
            return Err(Error::DuplicateId(format!("net {}", c.net)));
        }
        if c.cuboids.is_empty() {
            return Err(Error::InvalidCuboid(format!("net {} has no cuboids", c.net)));
        }
        for (k, cub) in c.cuboids.iter().enumerate() {
            Cuboid::new(cub.lo, cub.hi)?;
            if c.cuboids[..k].iter().any(|o| o.overlaps(cub)) {
                return Err(Error::Overlap(format!("cuboids of net {} overlap", c.net)));
            }
        }
        for d in &conductors[..i] {
            for a in &c.cuboids {
                for b in &d.cuboids {
                    if a.overlaps(b) {
                        return Err(Error::Overlap(format!(
                            "nets {} and {} share interior volume",
                            d.net, c.net
                        )));
                    }
                    if a.meets(b) {
                        return Err(Error::Overlap(format!("nets {} and {} touch", d.net, c.net)));
                    }
                }
            }
        }
        let home = regions
            .iter()
            .find(|r| c.cuboids.iter().all(|b| r.bounds.strictly_contains(b)));
        if home.is_none() {
            return Err(Error::ConductorNotInterior { net: c.net });
        }
    }

    Ok(Scene {
        domain,
        regions,
        conductors,
        outer,
    })
}

impl Scene {
    pub fn domain(&self) -> &Cuboid {
        &self.domain
    }

    pub fn regions(&self) -> &[DielectricRegion] {
        &self.regions
    }

    pub fn conductors(&self) -> &[Conductor] {
        &self.conductors
    }

    pub fn outer(&self) -> &OuterBoundary {
        &self.outer
    }

    pub fn conductor(&self, net: u32) -> Option<&Conductor> {
        self.conductors.iter().find(|c| c.net == net)
    }

    pub fn region(&self, id: u32) -> Option<&DielectricRegion> {
        self.regions.iter().find(|r| r.id == id)
    }

    pub fn net_ids(&self) -> Vec<u32> {
        self.conductors.iter().map(|c| c.net).collect()
    }

    /// Region whose box strictly contains the conductor.
    pub fn region_of_conductor(&self, net: u32) -> Option<u32> {
        let c = self.conductor(net)?;
        self.regions
            .iter()
            .find(|r| c.cuboids.iter().all(|b| r.bounds.strictly_contains(b)))
            .map(|r| r.id)
    }

    pub fn is_single_dielectric(&self) -> bool {
        self.regions.len() == 1
    }

    /// Copy with every relative permittivity multiplied by `factor`.
    pub fn with_scaled_permittivity(&self, factor: f64) -> Scene {
        let mut s = self.clone();
        for r in &mut s.regions {
            r.rel_permittivity *= factor;
        }
        s
    }

    pub fn with_permittivity(&self, region: u32, eps: f64) -> Scene {
        let mut s = self.clone();
        for r in &mut s.regions {
            if r.id == region {
                r.rel_permittivity = eps;
            }
        }
        s
    }

    pub fn translated(&self, offset: Point) -> Scene {
        Scene {
            domain: self.domain.translated(offset),
            regions: self
                .regions
                .iter()
                .map(|r| DielectricRegion {
                    bounds: r.bounds.translated(offset),
                    ..*r
                })
                .collect(),
            conductors: self
                .conductors
                .iter()
                .map(|c| Conductor::new(c.net, c.cuboids.iter().map(|b| b.translated(offset)).collect()))
                .collect(),
            outer: self.outer,
        }
    }
}

/// Prism with an isosceles trapezoid cross-section.
///
/// The prism runs along `length_axis`; its width lies along `width_axis` and
/// its height along the remaining axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrapezoidPrism {
    pub length_axis: Axis,
    pub width_axis: Axis,
    pub length: Interval,
    pub width_center: f64,
    pub base_level: f64,
    pub height: f64,
    pub bottom_width: f64,
    pub top_width: f64,
}

impl TrapezoidPrism {
    pub fn height_axis(&self) -> Axis {
        self.length_axis.third(self.width_axis)
    }

    pub fn width_at(&self, h: f64) -> f64 {
        self.bottom_width + (self.top_width - self.bottom_width) * (h / self.height)
    }

    pub fn volume(&self) -> f64 {
        0.5 * (self.bottom_width + self.top_width) * self.height * self.length.len()
    }
}

/// Staircase approximation: `slab_count` stacked cuboids, each as wide as the
/// trapezoid at the slab's mid-height.
pub fn approximate_trapezoid(prism: &TrapezoidPrism, slab_count: usize) -> Result<Vec<Cuboid>> {
    if slab_count < 1 {
        return Err(Error::InvalidSlabCount);
    }
    if prism.length_axis == prism.width_axis
        || !(prism.height > 0.0 && prism.bottom_width > 0.0 && prism.top_width > 0.0)
    {
        return Err(Error::InvalidCuboid("degenerate trapezoid prism".into()));
    }
    let dh = prism.height / slab_count as f64;
    let (li, wi, hi) = (
        prism.length_axis.index(),
        prism.width_axis.index(),
        prism.height_axis().index(),
    );
    (0..slab_count)
        .map(|k| {
            let w = prism.width_at((k as f64 + 0.5) * dh);
            let mut lo = [0.0; 3];
            let mut up = [0.0; 3];
            lo[li] = prism.length.lo;
            up[li] = prism.length.hi;
            lo[wi] = prism.width_center - 0.5 * w;
            up[wi] = prism.width_center + 0.5 * w;
            lo[hi] = prism.base_level + k as f64 * dh;
            up[hi] = if k + 1 == slab_count {
                prism.base_level + prism.height
            } else {
                prism.base_level + (k + 1) as f64 * dh
            };
            Cuboid::new(lo, up)
        })
        .collect()
}

/// `base` minus the union of `holes` (all in the same plane), as a list of
/// disjoint rectangles carrying `base`'s orientation.
fn subtract_rects(base: &Rect, holes: &[Rect]) -> Vec<Rect> {
    if holes.is_empty() {
        return alloc::vec![*base];
    }
    let mut xs = alloc::vec![base.span_a.lo, base.span_a.hi];
    let mut ys = alloc::vec![base.span_b.lo, base.span_b.hi];
    for h in holes {
        for x in [h.span_a.lo, h.span_a.hi] {
            if base.span_a.lo < x && x < base.span_a.hi {
                xs.push(x);
            }
        }
        for y in [h.span_b.lo, h.span_b.hi] {
            if base.span_b.lo < y && y < base.span_b.hi {
                ys.push(y);
            }
        }
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    ys.sort_by(f64::total_cmp);
    ys.dedup();

    let free = |i: usize, j: usize| {
        let (cx, cy) = (0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1]));
        !holes.iter().any(|h| {
            h.span_a.lo < cx && cx < h.span_a.hi && h.span_b.lo < cy && cy < h.span_b.hi
        })
    };

    // Runs of free cells along b for every a-column, merged across columns
    // whenever the run is identical.
    let mut out = Vec::new();
    let mut open: Vec<(usize, usize, usize)> = Vec::new(); // (j0, j1, i_start)
    for i in 0..xs.len() - 1 {
        let mut runs = Vec::new();
        let mut j = 0;
        while j < ys.len() - 1 {
            if free(i, j) {
                let j0 = j;
                while j < ys.len() - 1 && free(i, j) {
                    j += 1;
                }
                runs.push((j0, j));
            } else {
                j += 1;
            }
        }
        let mut next_open = Vec::new();
        for &(j0, j1, i0) in &open {
            if runs.contains(&(j0, j1)) {
                next_open.push((j0, j1, i0));
            } else {
                out.push((i0, i, j0, j1));
            }
        }
        for &(j0, j1) in &runs {
            if !open.iter().any(|&(a, b, _)| a == j0 && b == j1) {
                next_open.push((j0, j1, i));
            }
        }
        open = next_open;
    }
    let last = xs.len() - 1;
    for (j0, j1, i0) in open {
        out.push((i0, last, j0, j1));
    }
    out.sort_by_key(|&(i0, _, j0, _)| (i0, j0));
    out.into_iter()
        .map(|(i0, i1, j0, j1)| Rect {
            span_a: Interval::new(xs[i0], xs[i1]),
            span_b: Interval::new(ys[j0], ys[j1]),
            ..*base
        })
        .collect()
}

/// Every boundary face of the scene: conductor surfaces (internal contacts
/// between cuboids of one net removed), outer walls split per region, then
/// region interfaces.
pub fn extract_faces(scene: &Scene) -> Vec<BoundaryFace> {
    let mut faces = Vec::new();

    for c in &scene.conductors {
        let owner = scene
            .region_of_conductor(c.net)
            .expect("validated scene places every conductor in a region");
        for (ci, cub) in c.cuboids.iter().enumerate() {
            for face in cub.faces() {
                let k = face.axis.index();
                let holes: Vec<Rect> = c
                    .cuboids
                    .iter()
                    .enumerate()
                    .filter(|&(oi, _)| oi != ci)
                    .filter_map(|(_, other)| {
                        let touching = if face.normal_sign > 0.0 {
                            other.lo[k] == face.level
                        } else {
                            other.hi[k] == face.level
                        };
                        if !touching {
                            return None;
                        }
                        let sa = face.span_a.intersect(&other.span(face.axis.others().0))?;
                        let sb = face.span_b.intersect(&other.span(face.axis.others().1))?;
                        Some(Rect {
                            span_a: sa,
                            span_b: sb,
                            ..face
                        })
                    })
                    .collect();
                for rect in subtract_rects(&face, &holes) {
                    faces.push(BoundaryFace {
                        rect,
                        kind: FaceKind::Conductor(c.net),
                        owner,
                        other_owner: None,
                    });
                }
            }
        }
    }

    let domain = &scene.domain;
    for (fi, wall) in domain.faces().iter().enumerate() {
        let kind = match scene.outer.0[fi] {
            OuterBc::Dirichlet => FaceKind::DirichletOuter,
            OuterBc::Neumann => FaceKind::NeumannOuter,
        };
        for r in &scene.regions {
            let rf = r.bounds.faces()[fi];
            if rf.level == wall.level {
                faces.push(BoundaryFace {
                    // outer normals point into the domain
                    rect: rf.flipped(),
                    kind,
                    owner: r.id,
                    other_owner: None,
                });
            }
        }
    }

    let mut order: Vec<&DielectricRegion> = scene.regions.iter().collect();
    order.sort_by_key(|r| r.id);
    for (i, ra) in order.iter().enumerate() {
        for rb in &order[i + 1..] {
            for axis in Axis::ALL {
                let k = axis.index();
                let sign = if ra.bounds.hi[k] == rb.bounds.lo[k] {
                    1.0
                } else if ra.bounds.lo[k] == rb.bounds.hi[k] {
                    -1.0
                } else {
                    continue;
                };
                let (a, b) = axis.others();
                let (Some(sa), Some(sb)) = (
                    ra.bounds.span(a).intersect(&rb.bounds.span(a)),
                    ra.bounds.span(b).intersect(&rb.bounds.span(b)),
                ) else {
                    continue;
                };
                faces.push(BoundaryFace {
                    rect: Rect {
                        axis,
                        level: if sign > 0.0 { ra.bounds.hi[k] } else { ra.bounds.lo[k] },
                        span_a: sa,
                        span_b: sb,
                        normal_sign: sign,
                    },
                    kind: FaceKind::Interface { a: ra.id, b: rb.id },
                    owner: ra.id,
                    other_owner: Some(rb.id),
                });
            }
        }
    }
    faces
}

/// Euclidean distance from the rectangle to the union of the net's cuboids.
pub fn face_distance(rect: &Rect, main: &Conductor) -> f64 {
    main.cuboids
        .iter()
        .map(|c| c.distance_to_rect(rect))
        .fold(f64::INFINITY, f64::min)
}

/// True when the rectangle lies inside one face of one of the net's cuboids.
pub fn lies_on_surface(rect: &Rect, net: &Conductor) -> bool {
    let (a, b) = rect.axis.others();
    net.cuboids.iter().any(|c| {
        let s = c.span(rect.axis);
        (rect.level == s.lo || rect.level == s.hi)
            && c.span(a).lo <= rect.span_a.lo
            && rect.span_a.hi <= c.span(a).hi
            && c.span(b).lo <= rect.span_b.lo
            && rect.span_b.hi <= c.span(b).hi
    })
}
