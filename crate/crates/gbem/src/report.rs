//! Run reports in CSV and JSON, and the binary matrix dump.

use std::io::{self, Write};
use std::path::Path;

use gbem_core::extraction::{Baseline, CapacitanceRow};
use gbem_core::partition::PartitionParams;
use gbem_core::solver::{Matrix, Method};
use serde::Serialize;

/// Nine significant digits in scientific notation.
pub fn fmt9(v: f64) -> String {
    format!("{v:.8e}")
}

/// `v` rounded to nine significant digits.
pub fn round9(v: f64) -> f64 {
    fmt9(v).parse().unwrap_or(v)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamsEcho {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p5: f64,
    pub exp_dirichlet: f64,
    pub exp_interface_neumann: f64,
    pub aspect_cap: f64,
    pub baseline: &'static str,
    pub rel_tol: f64,
    pub max_levels: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowReport {
    pub net: u32,
    /// Capacitance to every net of [`RunReport::nets`], farads.
    pub capacitance: Vec<f64>,
    pub wall_charge: f64,
    pub panels: usize,
    pub unknowns: usize,
    pub method: &'static str,
    pub residual_norm: f64,
    pub neutrality_defect: f64,
    pub unconverged: usize,
    pub cholesky_failed: bool,
    pub assembly_seconds: f64,
    pub solve_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub input: String,
    pub params: ParamsEcho,
    pub nets: Vec<u32>,
    pub rows: Vec<RowReport>,
    /// Present when every net has a row.
    pub reciprocity_defect: Option<f64>,
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Cholesky => "cholesky",
        Method::Lu => "lu",
    }
}

pub fn baseline_name(b: Baseline) -> &'static str {
    match b {
        Baseline::Galerkin => "galerkin",
        Baseline::Collocation => "collocation",
    }
}

impl RunReport {
    /// Builds a report with every number rounded to nine significant digits.
    pub fn new(
        input: String,
        params: &PartitionParams,
        baseline: Baseline,
        quadrature: &gbem_core::kernels::QuadratureConfig,
        rows: &[CapacitanceRow],
        reciprocity_defect: Option<f64>,
    ) -> Self {
        let nets = rows.first().map(|r| r.nets.clone()).unwrap_or_default();
        RunReport {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            input,
            params: ParamsEcho {
                p1: params.p1,
                p2: params.p2,
                p3: params.p3,
                p5: params.p5,
                exp_dirichlet: params.exp_dirichlet,
                exp_interface_neumann: params.exp_interface_neumann,
                aspect_cap: params.aspect_cap,
                baseline: baseline_name(baseline),
                rel_tol: quadrature.rel_tol,
                max_levels: quadrature.max_levels,
            },
            nets,
            rows: rows
                .iter()
                .map(|r| {
                    let d = &r.diagnostics;
                    RowReport {
                        net: r.main_net,
                        capacitance: r.values.iter().copied().map(round9).collect(),
                        wall_charge: round9(r.wall_charge),
                        panels: d.panels,
                        unknowns: d.unknowns,
                        method: method_name(d.method),
                        residual_norm: round9(d.residual_norm),
                        neutrality_defect: round9(d.neutrality_defect),
                        unconverged: d.unconverged,
                        cholesky_failed: d.cholesky_failed,
                        assembly_seconds: round9(d.assembly_seconds),
                        solve_seconds: round9(d.solve_seconds),
                    }
                })
                .collect(),
            reciprocity_defect: reciprocity_defect.map(round9),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Capacitance rows with net-id headers, followed by a diagnostics table.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("net");
        for n in &self.nets {
            s.push_str(&format!(",C_{n}"));
        }
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.net.to_string());
            for v in &r.capacitance {
                s.push(',');
                s.push_str(&fmt9(*v));
            }
            s.push('\n');
        }
        s.push('\n');
        s.push_str("net,panels,unknowns,method,residual_norm,neutrality_defect,wall_charge,assembly_seconds,solve_seconds\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.net,
                r.panels,
                r.unknowns,
                r.method,
                fmt9(r.residual_norm),
                fmt9(r.neutrality_defect),
                fmt9(r.wall_charge),
                fmt9(r.assembly_seconds),
                fmt9(r.solve_seconds)
            ));
        }
        if let Some(d) = self.reciprocity_defect {
            s.push_str(&format!("\nreciprocity_defect,{}\n", fmt9(d)));
        }
        s
    }
}

/// Dense row-major dump: the dimension as a little-endian `u64`, then every
/// entry as a little-endian `f64`.
pub fn write_matrix<W: Write>(m: &Matrix, mut w: W) -> io::Result<()> {
    w.write_all(&(m.dim() as u64).to_le_bytes())?;
    for v in m.as_slice() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()
}

pub fn write_matrix_file(m: &Matrix, path: &Path) -> io::Result<()> {
    let f = std::fs::File::create(path)?;
    write_matrix(m, io::BufWriter::new(f))
}

/// Reads a dump written by [`write_matrix`].
pub fn read_matrix(bytes: &[u8]) -> Option<Matrix> {
    let n = u64::from_le_bytes(bytes.get(..8)?.try_into().ok()?) as usize;
    let body = bytes.get(8..)?;
    if body.len() != n.checked_mul(n)?.checked_mul(8)? {
        return None;
    }
    let data = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Matrix::from_row_major(n, data).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_digits() {
        assert_eq!(fmt9(2.246227741020809e-16), "2.24622774e-16");
        assert_eq!(fmt9(-1.0), "-1.00000000e0");
        assert_eq!(round9(1.0 / 3.0), 0.333333333);
    }

    #[test]
    fn matrix_dump_round_trip() {
        let m = Matrix::from_rows(&[vec![1.0, -2.5], vec![3.0, 1e-300]]).unwrap();
        let mut buf = Vec::new();
        write_matrix(&m, &mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 4 * 8);
        assert_eq!(&buf[..8], &2u64.to_le_bytes());
        assert_eq!(read_matrix(&buf), Some(m));
        assert_eq!(read_matrix(&buf[..20]), None);
    }
}
