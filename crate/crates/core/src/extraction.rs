//! Per-net solves, net charges and the capacitance matrix.
//!
//! A row of the matrix is the charge on every net when the main net is held
//! at 1 V and all other nets and Dirichlet walls at 0 V. Area-scaled fluxes
//! are in μm; a charge is `eps0 * eps_r * X * 1e-6` coulombs.

use alloc::vec::Vec;

// needed when std is absent from the build graph
#[allow(unused_imports)]
use num_traits::Float;

use crate::assembly::{self, permittivity, BlockSystem, Slot};
use crate::error::{Error, Result};
use crate::geometry::{FaceKind, Scene};
use crate::kernels::QuadratureConfig;
use crate::partition::{partition_scene, PanelSet, PartitionParams};
use crate::solver::{cholesky_solve, lu_solve, Matrix, Method, Solution};
use crate::EPSILON_0;

/// Metres per micrometre.
pub const UNIT_SCALE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Baseline {
    Galerkin,
    Collocation,
}

#[derive(Clone, Copy, Debug)]
pub struct ExtractOptions {
    pub baseline: Baseline,
    /// Retry a failed Cholesky factorisation with LU instead of failing.
    pub lu_fallback: bool,
    pub quadrature: QuadratureConfig,
    /// Monotonic clock in seconds for the timing diagnostics.
    pub clock: Option<fn() -> f64>,
    /// Return the assembled system matrix with each row.
    pub keep_matrix: bool,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            baseline: Baseline::Galerkin,
            lu_fallback: false,
            quadrature: QuadratureConfig::default(),
            clock: None,
            keep_matrix: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RowDiagnostics {
    pub panels: usize,
    pub unknowns: usize,
    pub method: Method,
    pub residual_norm: f64,
    /// `|sum of all conductor and wall charges| / |Q_main|`.
    pub neutrality_defect: f64,
    /// Kernel evaluations that hit the quadrature level budget.
    pub unconverged: usize,
    /// Cholesky failed and LU was used instead.
    pub cholesky_failed: bool,
    pub assembly_seconds: f64,
    pub solve_seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CapacitanceRow {
    pub main_net: u32,
    /// Net ids in ascending order.
    pub nets: Vec<u32>,
    /// Charge in coulombs on each net at 1 V on the main net, i.e. farads.
    pub values: Vec<f64>,
    /// Charge induced on the Dirichlet walls.
    pub wall_charge: f64,
    pub diagnostics: RowDiagnostics,
    /// System matrix, when requested through [`ExtractOptions::keep_matrix`].
    pub matrix: Option<Matrix>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CapacitanceMatrix {
    pub nets: Vec<u32>,
    /// Row-major, farads.
    pub values: Vec<Vec<f64>>,
    pub rows: Vec<RowDiagnostics>,
    /// Largest `|C_mn - C_nm| / max(|C_mn|, |C_nm|)`.
    pub reciprocity_defect: f64,
}

impl CapacitanceMatrix {
    pub fn get(&self, m: u32, n: u32) -> Option<f64> {
        let i = self.nets.iter().position(|&x| x == m)?;
        let j = self.nets.iter().position(|&x| x == n)?;
        Some(self.values[i][j])
    }
}

/// Charge on every net from per-panel area-scaled fluxes `X_j = q_j |I_j|`,
/// taken in the region the panel belongs to. Nets come back in ascending
/// id order.
pub fn net_charges(fluxes: &[f64], panels: &PanelSet, eps: &[(u32, f64)], unit_scale: f64) -> Result<Vec<(u32, f64)>> {
    if fluxes.len() != panels.len() {
        return Err(Error::Dimension(alloc::format!(
            "{} fluxes for {} panels",
            fluxes.len(),
            panels.len()
        )));
    }
    let mut out: Vec<(u32, f64)> = Vec::new();
    for (p, x) in panels.panels.iter().zip(fluxes) {
        if let FaceKind::Conductor(net) = p.kind {
            let q = EPSILON_0 * permittivity(eps, p.owner)? * x * unit_scale;
            match out.iter_mut().find(|(n, _)| *n == net) {
                Some(e) => e.1 += q,
                None => out.push((net, q)),
            }
        }
    }
    out.sort_by_key(|e| e.0);
    Ok(out)
}

fn wall_charge(fluxes: &[f64], panels: &PanelSet, eps: &[(u32, f64)]) -> Result<f64> {
    let mut sum = 0.0;
    for (p, x) in panels.panels.iter().zip(fluxes) {
        if p.kind == FaceKind::DirichletOuter {
            sum += EPSILON_0 * permittivity(eps, p.owner)? * x * UNIT_SCALE;
        }
    }
    Ok(sum)
}

fn block_fluxes(sys: &BlockSystem, sol: &Solution, panels: &PanelSet) -> Vec<f64> {
    sys.unknown_map
        .iter()
        .zip(&panels.panels)
        .map(|(slots, p)| match (slots.q, p.kind) {
            (Slot::Unknown(k), FaceKind::Conductor(_) | FaceKind::DirichletOuter) => sol.x[k],
            _ => 0.0,
        })
        .collect()
}

/// Capacitance row of `main_net` on the distance-graded partition.
pub fn capacitance_row(scene: &Scene, main_net: u32, params: &PartitionParams, opts: &ExtractOptions) -> Result<CapacitanceRow> {
    let panels = partition_scene(scene, main_net, params)?;
    capacitance_row_on(scene, &panels, opts)
}

/// Capacitance row for an already partitioned scene; the main net is the
/// one the panel set was built for.
pub fn capacitance_row_on(scene: &Scene, panels: &PanelSet, opts: &ExtractOptions) -> Result<CapacitanceRow> {
    let now = || opts.clock.map_or(0.0, |c| c());
    let eps = assembly::permittivities(scene);
    let t0 = now();
    let single = scene.is_single_dielectric() && panels.classes.neumann.is_empty();
    let keep = |m: Matrix| if opts.keep_matrix { Some(m) } else { None };
    let (fluxes, sol, unknowns, unconverged, cholesky_failed, t1, matrix) = match opts.baseline {
        Baseline::Galerkin if single => {
            let sys = assembly::assemble_single(panels, &opts.quadrature)?;
            let t1 = now();
            let (sol, failed) = match cholesky_solve(&sys.matrix, &sys.rhs) {
                Ok(s) => (s, false),
                Err(Error::NotPositiveDefinite { .. }) if opts.lu_fallback => (lu_solve(&sys.matrix, &sys.rhs)?, true),
                Err(e) => return Err(e),
            };
            (sol.x.clone(), sol, sys.unknowns.len(), sys.unconverged, failed, t1, keep(sys.matrix))
        }
        baseline => {
            let sys = if baseline == Baseline::Collocation {
                assembly::assemble_collocation(panels, &eps)?
            } else {
                assembly::assemble_multi(panels, &eps, &opts.quadrature)?
            };
            let t1 = now();
            let sol = lu_solve(&sys.matrix, &sys.rhs)?;
            let fluxes = block_fluxes(&sys, &sol, panels);
            (fluxes, sol, sys.rhs.len(), sys.unconverged, false, t1, keep(sys.matrix))
        }
    };
    let t2 = now();
    let charges = net_charges(&fluxes, panels, &eps, UNIT_SCALE)?;
    let walls = wall_charge(&fluxes, panels, &eps)?;
    let mut nets = scene.net_ids();
    nets.sort_unstable();
    let values: Vec<f64> = nets
        .iter()
        .map(|n| charges.iter().find(|c| c.0 == *n).map_or(0.0, |c| c.1))
        .collect();
    let q_main = charges
        .iter()
        .find(|c| c.0 == panels.main_net)
        .map_or(0.0, |c| c.1);
    let total: f64 = values.iter().sum::<f64>() + walls;
    let neutrality_defect = if q_main == 0.0 { f64::INFINITY } else { (total / q_main).abs() };
    Ok(CapacitanceRow {
        main_net: panels.main_net,
        nets,
        values,
        wall_charge: walls,
        diagnostics: RowDiagnostics {
            panels: panels.len(),
            unknowns,
            method: sol.method,
            residual_norm: sol.residual_norm,
            neutrality_defect,
            unconverged,
            cholesky_failed,
            assembly_seconds: t1 - t0,
            solve_seconds: t2 - t1,
        },
        matrix,
    })
}

/// One row per net, in ascending net order.
pub fn capacitance_matrix(scene: &Scene, params: &PartitionParams, opts: &ExtractOptions) -> Result<CapacitanceMatrix> {
    let mut nets = scene.net_ids();
    if nets.is_empty() {
        return Err(Error::NoConductors);
    }
    nets.sort_unstable();
    let rows = nets
        .iter()
        .map(|&n| capacitance_row(scene, n, params, opts))
        .collect::<Result<Vec<_>>>()?;
    CapacitanceMatrix::from_rows(rows)
}

impl CapacitanceMatrix {
    /// Collects one row per net; rows may come in any order.
    pub fn from_rows(mut rows: Vec<CapacitanceRow>) -> Result<Self> {
        rows.sort_by_key(|r| r.main_net);
        let nets: Vec<u32> = rows.iter().map(|r| r.main_net).collect();
        if nets.is_empty() {
            return Err(Error::NoConductors);
        }
        if rows.iter().any(|r| r.nets != nets) {
            return Err(Error::Dimension("rows do not cover the same nets".into()));
        }
        let mut reciprocity_defect: f64 = 0.0;
        for i in 0..nets.len() {
            for j in i + 1..nets.len() {
                let (a, b) = (rows[i].values[j], rows[j].values[i]);
                let m = a.abs().max(b.abs());
                if m > 0.0 {
                    reciprocity_defect = reciprocity_defect.max((a - b).abs() / m);
                }
            }
        }
        let (values, diags) = rows.into_iter().map(|r| (r.values, r.diagnostics)).unzip();
        Ok(CapacitanceMatrix {
            nets,
            values,
            rows: diags,
            reciprocity_defect,
        })
    }
}
