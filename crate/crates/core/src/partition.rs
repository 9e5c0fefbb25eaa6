//! Distance-graded panelling of boundary faces.
//!
//! The admissible panel area grows with the distance to the main net: flat
//! `p4` inside `p5`, then `p4 * p3 * (d / p5)^e` with `e = 3` on conductor and
//! Dirichlet faces and `e = 2` on interfaces and Neumann walls. `p4` is `p1`,
//! or `p1 * p2` on faces turned away from the main net.

use alloc::format;
use alloc::vec::Vec;
use core::ops::Range;

// needed when std is absent from the build graph
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{self, BoundaryFace, Conductor, FaceKind, Rect, Scene};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartitionParams {
    /// Near-field panel area, μm².
    pub p1: f64,
    /// Multiplier for faces turned away from the main net.
    pub p2: f64,
    /// Far-field multiplier.
    pub p3: f64,
    /// Near-field distance threshold, μm.
    pub p5: f64,
    pub exp_dirichlet: f64,
    pub exp_interface_neumann: f64,
    /// Largest allowed side ratio of a panel.
    pub aspect_cap: f64,
}

impl Default for PartitionParams {
    fn default() -> Self {
        PartitionParams {
            p1: 1.5,
            p2: 4.0,
            p3: 1.0,
            p5: 1.0,
            exp_dirichlet: 3.0,
            exp_interface_neumann: 2.0,
            aspect_cap: 4.0,
        }
    }
}

impl PartitionParams {
    pub fn new(p1: f64, p2: f64, p3: f64, p5: f64) -> Result<Self> {
        let p = PartitionParams {
            p1,
            p2,
            p3,
            p5,
            ..Default::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.p1,
            self.p2,
            self.p3,
            self.p5,
            self.exp_dirichlet,
            self.exp_interface_neumann,
            self.aspect_cap,
        ];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidParams(format!(
                "all parameters must be finite and positive: {:?}",
                self
            )));
        }
        if self.p2 < 1.0 {
            return Err(Error::InvalidParams(format!("p2 must be >= 1, got {}", self.p2)));
        }
        if self.aspect_cap < 1.0 {
            return Err(Error::InvalidParams(format!(
                "aspect cap must be >= 1, got {}",
                self.aspect_cap
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Facing {
    OnMainNet,
    Facing,
    Back,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Panel {
    pub rect: Rect,
    pub kind: FaceKind,
    pub owner: u32,
    pub other_owner: Option<u32>,
    pub area: f64,
    pub dist_to_main: f64,
    pub facing: Facing,
}

impl Panel {
    pub fn face(&self) -> BoundaryFace {
        BoundaryFace {
            rect: self.rect,
            kind: self.kind,
            owner: self.owner,
            other_owner: self.other_owner,
        }
    }

    pub fn on_region(&self, region: u32) -> bool {
        self.owner == region || self.other_owner == Some(region)
    }
}

/// Unknown classes in system order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassRanges {
    pub conductor: Range<usize>,
    pub dirichlet: Range<usize>,
    pub neumann: Range<usize>,
    pub interface: Range<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PanelSet {
    pub panels: Vec<Panel>,
    pub classes: ClassRanges,
    /// Region id with the indices of the panels on its boundary, by region id.
    pub per_region: Vec<(u32, Vec<usize>)>,
    pub main_net: u32,
}

impl PanelSet {
    pub fn len(&self) -> usize {
        self.panels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.panels.is_empty()
    }

    pub fn region_panels(&self, region: u32) -> &[usize] {
        self.per_region
            .iter()
            .find(|(r, _)| *r == region)
            .map(|(_, v)| v.as_slice())
            .unwrap_or(&[])
    }

    pub fn region_count(&self) -> usize {
        self.per_region.len()
    }
}

/// Half-space test of the main net's bounding-box centre against the side of
/// the rectangle its normal points to.
pub fn classify_face(rect: &Rect, main: &Conductor) -> Facing {
    if geometry::lies_on_surface(rect, main) {
        return Facing::OnMainNet;
    }
    let c = main.bounding_box().center();
    let k = rect.axis.index();
    if (c[k] - rect.level) * rect.normal_sign > 0.0 {
        Facing::Facing
    } else {
        Facing::Back
    }
}

pub fn max_area(kind: FaceKind, facing: Facing, d: f64, params: &PartitionParams) -> f64 {
    let p4 = if facing == Facing::Back {
        params.p1 * params.p2
    } else {
        params.p1
    };
    if d <= params.p5 {
        return p4;
    }
    let e = match kind {
        FaceKind::Conductor(_) | FaceKind::DirichletOuter => params.exp_dirichlet,
        FaceKind::Interface { .. } | FaceKind::NeumannOuter => params.exp_interface_neumann,
    };
    p4 * params.p3 * (d / params.p5).powf(e)
}

/// Recursive bisection of the face along its longer side until every piece
/// satisfies its own area bound (evaluated at the piece's nearest point to
/// the main net) and the aspect cap.
pub fn partition_face<F>(
    face: &BoundaryFace,
    main: &Conductor,
    facing: Facing,
    bound: F,
    aspect_cap: f64,
) -> Vec<Panel>
where
    F: Fn(f64) -> f64,
{
    let mut out = Vec::new();
    let mut stack = alloc::vec![face.rect];
    while let Some(rect) = stack.pop() {
        let d = geometry::face_distance(&rect, main);
        let area = rect.area();
        let limit = bound(d);
        debug_assert!(limit > 0.0);
        if area <= limit && rect.aspect() <= aspect_cap {
            out.push(Panel {
                rect,
                kind: face.kind,
                owner: face.owner,
                other_owner: face.other_owner,
                area,
                dist_to_main: d,
                facing,
            });
            continue;
        }
        let (a, b) = rect.axis.others();
        let (axis, span) = if rect.span_a.len() >= rect.span_b.len() {
            (a, rect.span_a)
        } else {
            (b, rect.span_b)
        };
        let (lo, hi) = rect
            .split(axis, span.mid())
            .expect("midpoint of a nondegenerate span is interior");
        // pushed in reverse so the low half is emitted first
        stack.push(hi);
        stack.push(lo);
    }
    out
}

fn class_of(kind: FaceKind) -> usize {
    match kind {
        FaceKind::Conductor(_) => 0,
        FaceKind::DirichletOuter => 1,
        FaceKind::NeumannOuter => 2,
        FaceKind::Interface { .. } => 3,
    }
}

/// Panels every boundary face of the scene relative to `main_net`.
pub fn partition_scene(scene: &Scene, main_net: u32, params: &PartitionParams) -> Result<PanelSet> {
    params.validate()?;
    partition_scene_with(scene, main_net, params.aspect_cap, |kind, facing, d| {
        max_area(kind, facing, d, params)
    })
}

/// Like [`partition_scene`] with an arbitrary area bound, e.g. a uniform one.
pub fn partition_scene_with<B>(
    scene: &Scene,
    main_net: u32,
    aspect_cap: f64,
    bound: B,
) -> Result<PanelSet>
where
    B: Fn(FaceKind, Facing, f64) -> f64,
{
    let main = scene.conductor(main_net).ok_or(Error::UnknownNet(main_net))?;
    let faces = geometry::extract_faces(scene);
    let mut buckets: [Vec<Panel>; 4] = Default::default();
    for face in &faces {
        let facing = classify_face(&face.rect, main);
        let panels = partition_face(face, main, facing, |d| bound(face.kind, facing, d), aspect_cap);
        buckets[class_of(face.kind)].extend(panels);
    }
    let mut panels = Vec::with_capacity(buckets.iter().map(Vec::len).sum());
    let mut ranges = [0..0, 0..0, 0..0, 0..0];
    for (i, b) in buckets.into_iter().enumerate() {
        let start = panels.len();
        panels.extend(b);
        ranges[i] = start..panels.len();
    }
    let [conductor, dirichlet, neumann, interface] = ranges;

    let mut ids: Vec<u32> = scene.regions().iter().map(|r| r.id).collect();
    ids.sort_unstable();
    let per_region = ids
        .into_iter()
        .map(|r| {
            let idx = panels
                .iter()
                .enumerate()
                .filter(|(_, p)| p.on_region(r))
                .map(|(i, _)| i)
                .collect();
            (r, idx)
        })
        .collect();

    Ok(PanelSet {
        panels,
        classes: ClassRanges {
            conductor,
            dirichlet,
            neumann,
            interface,
        },
        per_region,
        main_net,
    })
}
