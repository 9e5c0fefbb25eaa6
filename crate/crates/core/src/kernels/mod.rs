//! Panel-pair integrals of the Laplace single-layer kernel
//! `u*(x, y) = 1 / (4 pi |x - y|)` and double-layer kernel
//! `q*(x, y) = <x - y, n_y> / (4 pi |x - y|^3)`.
//!
//! Values are raw surface integrals: U in um^3, Q in um^2.

mod oracle;
mod pair;
mod point;
mod quadrature;

pub use oracle::oracle_pair_integral;
pub use pair::{q_pair_integral, u_pair_integral};
pub use point::{q_point_integral, u_point_integral};
pub use quadrature::{diff_apply, gauss_legendre, romberg, Estimate, QuadratureConfig};

use crate::error::Result;
use crate::geometry::Rect;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelKind {
    SingleLayerU,
    DoubleLayerQ,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub kind: KernelKind,
    /// False when some Romberg piece hit its level budget.
    pub converged: bool,
}

/// Dispatch on `kind`.
pub fn pair_integral(kind: KernelKind, ii: &Rect, ij: &Rect, cfg: &QuadratureConfig) -> Result<KernelValue> {
    match kind {
        KernelKind::SingleLayerU => u_pair_integral(ii, ij, cfg),
        KernelKind::DoubleLayerQ => q_pair_integral(ii, ij, cfg),
    }
}
