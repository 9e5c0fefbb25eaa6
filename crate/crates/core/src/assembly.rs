//! Discrete systems: the symmetric Galerkin system for one dielectric, the
//! block system for several dielectrics and the collocation baseline.
//!
//! Flux unknowns are scaled by panel area, `X_j = q_j |I_j|`, where `q` is
//! the normal derivative of the potential along the region-outward normal.
//! Block rows are the boundary integral equation of one region tested on one
//! of its panels and divided by the panel area:
//!
//! `(1/2 |I_i| u_i + sum_k Q_ik u_k - sum_j U_ij q_j) / |I_i| = 0`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{FaceKind, Scene};
use crate::kernels::{q_pair_integral, q_point_integral, u_pair_integral, u_point_integral, QuadratureConfig};
use crate::partition::{Panel, PanelSet};
use crate::solver::Matrix;

#[derive(Clone, Debug, PartialEq)]
pub struct GalerkinSystem {
    /// `a_ij = U_ij / (|I_i| |I_j|)`.
    pub matrix: Matrix,
    /// 1 on main-net panels, 0 elsewhere.
    pub rhs: Vec<f64>,
    /// Panel index of each unknown `X_j = q_j |I_j|`.
    pub unknowns: Vec<usize>,
    /// Symmetric to 1e-12 relative; positive definiteness is confirmed by
    /// the Cholesky solve.
    pub spd: bool,
    /// Number of kernel evaluations whose quadrature hit its level budget.
    pub unconverged: usize,
}

/// Value carried by a panel for one field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Slot {
    Unknown(usize),
    Fixed(f64),
}

/// Potential and area-scaled flux of one panel. For interfaces the flux is
/// taken in the lower-id region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PanelUnknowns {
    pub u: Slot,
    pub q: Slot,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockSystem {
    pub matrix: Matrix,
    pub rhs: Vec<f64>,
    pub unknown_map: Vec<PanelUnknowns>,
    /// Region and test panel of every row.
    pub row_map: Vec<(u32, usize)>,
    pub unconverged: usize,
}

impl BlockSystem {
    /// Potential and area-scaled flux on `panel` as seen from `region`,
    /// after a solve.
    pub fn panel_values(&self, x: &[f64], panel: &Panel, index: usize, region: u32, eps: &[(u32, f64)]) -> Result<(f64, f64)> {
        let pu = self.unknown_map[index];
        let get = |s: Slot| match s {
            Slot::Unknown(k) => x[k],
            Slot::Fixed(v) => v,
        };
        let mut q = get(pu.q);
        if let FaceKind::Interface { a, b } = panel.kind {
            if region == b {
                q *= -permittivity(eps, a)? / permittivity(eps, b)?;
            }
        }
        Ok((get(pu.u), q))
    }
}

/// Region permittivities of a scene, by region id.
pub fn permittivities(scene: &Scene) -> Vec<(u32, f64)> {
    scene.regions().iter().map(|r| (r.id, r.rel_permittivity)).collect()
}

pub(crate) fn permittivity(eps: &[(u32, f64)], region: u32) -> Result<f64> {
    eps.iter()
        .find(|(r, _)| *r == region)
        .map(|(_, e)| *e)
        .ok_or_else(|| Error::Assembly(format!("no permittivity for region {}", region)))
}

fn on_main(p: &Panel, main: u32) -> bool {
    p.kind == FaceKind::Conductor(main)
}

/// Symmetric Galerkin system of the single-layer operator for a scene with
/// one dielectric and Dirichlet walls.
pub fn assemble_single(panels: &PanelSet, cfg: &QuadratureConfig) -> Result<GalerkinSystem> {
    if panels.region_count() != 1 {
        return Err(Error::Assembly(format!(
            "single-dielectric assembly needs one region, got {}",
            panels.region_count()
        )));
    }
    if !panels.classes.neumann.is_empty() || !panels.classes.interface.is_empty() {
        return Err(Error::Assembly(
            "single-dielectric assembly needs Dirichlet walls only".into(),
        ));
    }
    let n = panels.len();
    let mut matrix = Matrix::zeros(n);
    let mut unconverged = 0;
    for i in 0..n {
        let pi = &panels.panels[i];
        for j in i..n {
            let pj = &panels.panels[j];
            let v = u_pair_integral(&pi.rect, &pj.rect, cfg)?;
            if !v.converged {
                unconverged += 1;
            }
            let a = v.value / (pi.area * pj.area);
            matrix[(i, j)] = a;
            matrix[(j, i)] = a;
        }
    }
    let rhs = panels
        .panels
        .iter()
        .map(|p| if on_main(p, panels.main_net) { 1.0 } else { 0.0 })
        .collect();
    let spd = matrix.asymmetry() <= 1e-12;
    Ok(GalerkinSystem {
        matrix,
        rhs,
        unknowns: (0..n).collect(),
        spd,
        unconverged,
    })
}

fn unknown_map(panels: &PanelSet) -> Result<(Vec<PanelUnknowns>, usize)> {
    let mut next = 0;
    let mut fresh = || {
        next += 1;
        Slot::Unknown(next - 1)
    };
    let mut prescribed = false;
    let map: Vec<PanelUnknowns> = panels
        .panels
        .iter()
        .map(|p| match p.kind {
            FaceKind::Conductor(net) => {
                prescribed = true;
                let u = if net == panels.main_net { 1.0 } else { 0.0 };
                PanelUnknowns {
                    u: Slot::Fixed(u),
                    q: fresh(),
                }
            }
            FaceKind::DirichletOuter => {
                prescribed = true;
                PanelUnknowns {
                    u: Slot::Fixed(0.0),
                    q: fresh(),
                }
            }
            FaceKind::NeumannOuter => PanelUnknowns {
                u: fresh(),
                q: Slot::Fixed(0.0),
            },
            FaceKind::Interface { .. } => {
                let u = fresh();
                PanelUnknowns { u, q: fresh() }
            }
        })
        .collect();
    if !prescribed {
        return Err(Error::Assembly(
            "no panel carries a prescribed potential; the problem is singular".into(),
        ));
    }
    Ok((map, next))
}

/// Rows `sum_k g(r, i, k) u_k - sum_j h(i, j) q_rj = 0` for every region `r`
/// and test panel `i` on its boundary.
fn build_block<G, H>(panels: &PanelSet, eps: &[(u32, f64)], mut g: G, mut h: H) -> Result<BlockSystem>
where
    G: FnMut(u32, usize, usize) -> Result<f64>,
    H: FnMut(usize, usize) -> Result<f64>,
{
    let (map, m) = unknown_map(panels)?;
    let mut row_map = Vec::with_capacity(m);
    for (r, idx) in &panels.per_region {
        for &i in idx {
            row_map.push((*r, i));
        }
    }
    if row_map.len() != m {
        return Err(Error::Assembly(format!(
            "{} rows for {} unknowns",
            row_map.len(),
            m
        )));
    }
    let mut matrix = Matrix::zeros(m);
    let mut rhs = vec![0.0; m];
    for (row, &(r, i)) in row_map.iter().enumerate() {
        for &k in panels.region_panels(r) {
            let pk = &panels.panels[k];
            let slots = map[k];
            match slots.u {
                Slot::Fixed(v) if v != 0.0 => rhs[row] -= v * g(r, i, k)?,
                Slot::Unknown(c) => matrix[(row, c)] += g(r, i, k)?,
                Slot::Fixed(_) => {}
            }
            if let Slot::Unknown(c) = slots.q {
                let factor = match pk.kind {
                    FaceKind::Interface { a, b } if r == b => -permittivity(eps, a)? / permittivity(eps, b)?,
                    _ => 1.0,
                };
                matrix[(row, c)] -= factor * h(i, k)?;
            }
        }
    }
    Ok(BlockSystem {
        matrix,
        rhs,
        unknown_map: map,
        row_map,
        unconverged: 0,
    })
}

fn shares_region(a: &Panel, b: &Panel) -> bool {
    a.on_region(b.owner) || b.other_owner.is_some_and(|o| a.on_region(o))
}

/// Galerkin block system for several dielectrics (or Neumann walls), with
/// interface unknowns `(u, q_a)` and `q_b = -(eps_a / eps_b) q_a`.
pub fn assemble_multi(panels: &PanelSet, eps: &[(u32, f64)], cfg: &QuadratureConfig) -> Result<BlockSystem> {
    for (r, _) in &panels.per_region {
        permittivity(eps, *r)?;
    }
    let n = panels.len();
    let ps = &panels.panels;
    let (map, _) = unknown_map(panels)?;
    let needs_u = |k: usize| !matches!(map[k].u, Slot::Fixed(v) if v == 0.0);
    let needs_q = |k: usize| matches!(map[k].q, Slot::Unknown(_));
    let mut unconverged = 0;
    // U is symmetric; Q is stored for the stored normal of the source panel
    let mut u = Matrix::zeros(n);
    let mut q = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if !shares_region(&ps[i], &ps[j]) {
                continue;
            }
            if j >= i && (needs_q(i) || needs_q(j)) {
                let v = u_pair_integral(&ps[i].rect, &ps[j].rect, cfg)?;
                unconverged += usize::from(!v.converged);
                u[(i, j)] = v.value;
                u[(j, i)] = v.value;
            }
            if needs_u(j) && i != j {
                let v = q_pair_integral(&ps[i].rect, &ps[j].rect, cfg)?;
                unconverged += usize::from(!v.converged);
                q[(i, j)] = v.value;
            }
        }
    }
    let mut sys = build_block(
        panels,
        eps,
        |r, i, k| {
            let pk = &ps[k];
            let half = if i == k { 0.5 * ps[i].area } else { 0.0 };
            Ok((half + pk.face().outward_sign(r) * q[(i, k)]) / ps[i].area)
        },
        |i, j| Ok(u[(i, j)] / (ps[i].area * ps[j].area)),
    )?;
    sys.unconverged = unconverged;
    Ok(sys)
}

/// Point-collocation system with the same unknowns as [`assemble_multi`],
/// each row tested at the centroid of its panel.
pub fn assemble_collocation(panels: &PanelSet, eps: &[(u32, f64)]) -> Result<BlockSystem> {
    for (r, _) in &panels.per_region {
        permittivity(eps, *r)?;
    }
    let ps = &panels.panels;
    let centroids: Vec<_> = ps.iter().map(|p| p.rect.centroid()).collect();
    build_block(
        panels,
        eps,
        |r, i, k| {
            let half = if i == k { 0.5 } else { 0.0 };
            Ok(half + ps[k].face().outward_sign(r) * q_point_integral(centroids[i], &ps[k].rect)?)
        },
        |i, j| Ok(u_point_integral(centroids[i], &ps[j].rect)? / ps[j].area),
    )
}
