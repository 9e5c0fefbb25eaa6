//! Alternating corner sums, Romberg extrapolation and Gauss-Legendre rules.

use alloc::vec::Vec;

// needed when std is absent from the build graph
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig {
    /// Relative change between successive Romberg diagonals that counts as
    /// converged.
    pub rel_tol: f64,
    pub max_levels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-8,
            max_levels: 16,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || self.max_levels < 4 || self.max_levels > MAX_LEVELS {
            return Err(Error::InvalidParams(alloc::format!(
                "quadrature config {:?}: need rel_tol > 0 and 4 <= max_levels <= {}",
                self,
                MAX_LEVELS
            )));
        }
        Ok(())
    }
}

const MAX_LEVELS: usize = 30;

/// Result of a numerical integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub converged: bool,
    pub evals: usize,
}

impl Estimate {
    fn zero() -> Self {
        Estimate {
            value: 0.0,
            converged: true,
            evals: 0,
        }
    }

    fn add(&mut self, other: Estimate) {
        self.value += other.value;
        self.converged &= other.converged;
        self.evals += other.evals;
    }
}

/// Alternating corner sum `D_{x1..xk}(u1, d1, .., uk, dk) f`: every corner
/// picks `u` or `d` per variable and carries sign `(-1)^(#d)`.
///
/// At most 8 variables.
pub fn diff_apply<F>(f: F, bounds: &[(f64, f64)]) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let k = bounds.len();
    assert!(k <= 8, "diff_apply supports at most 8 variables");
    let mut corner = [0.0; 8];
    let mut sum = 0.0;
    for mask in 0u32..(1 << k) {
        for (i, &(up, down)) in bounds.iter().enumerate() {
            corner[i] = if mask & (1 << i) == 0 { up } else { down };
        }
        let v = f(&corner[..k]);
        if !v.is_finite() {
            return Err(Error::NonFinite {
                value: v,
                at: corner[0],
            });
        }
        if mask.count_ones() % 2 == 0 {
            sum += v;
        } else {
            sum -= v;
        }
    }
    Ok(sum)
}

/// Romberg integration of `g` over `[a, b]`.
///
/// Stops once successive diagonal entries differ by at most
/// `cfg.rel_tol * |value|`; otherwise returns the last diagonal entry with
/// `converged == false`.
pub fn romberg<F>(g: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate>
where
    F: FnMut(f64) -> f64,
{
    cfg.validate()?;
    romberg_with(g, a, b, cfg.rel_tol, 0.0, 1, cfg.max_levels)
}

pub(crate) fn romberg_with<F>(
    mut g: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    min_level: usize,
    max_levels: usize,
) -> Result<Estimate>
where
    F: FnMut(f64) -> f64,
{
    let mut eval = |x: f64| -> Result<f64> {
        let v = g(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { value: v, at: x })
        }
    };
    let h0 = b - a;
    if h0 == 0.0 {
        return Ok(Estimate::zero());
    }
    let mut prev = [0.0f64; MAX_LEVELS + 1];
    let mut cur = [0.0f64; MAX_LEVELS + 1];
    prev[0] = 0.5 * h0 * (eval(a)? + eval(b)?);
    let mut evals = 2;
    let levels = max_levels.min(MAX_LEVELS);
    let mut h = h0;
    for level in 1..levels {
        let n_new = 1usize << (level - 1);
        h *= 0.5;
        let mut acc = 0.0;
        for i in 0..n_new {
            acc += eval(a + (2 * i + 1) as f64 * h)?;
        }
        evals += n_new;
        cur[0] = 0.5 * prev[0] + h * acc;
        let mut factor = 1.0;
        for j in 1..=level {
            factor *= 4.0;
            cur[j] = cur[j - 1] + (cur[j - 1] - prev[j - 1]) / (factor - 1.0);
        }
        let diff = (cur[level] - prev[level - 1]).abs();
        if level >= min_level && diff <= (rel_tol * cur[level].abs()).max(abs_tol) {
            return Ok(Estimate {
                value: cur[level],
                converged: true,
                evals,
            });
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    Ok(Estimate {
        value: prev[levels - 1],
        converged: false,
        evals,
    })
}

/// Tuning of the composite integrator used by the panel-pair reductions.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Composite {
    pub rel_tol: f64,
    /// Absolute tolerance for the whole interval, shared out by length.
    pub abs_tol: f64,
    pub max_levels: usize,
    pub min_level: usize,
    pub max_bisections: u32,
}

impl Composite {
    pub fn new(cfg: &QuadratureConfig, scale: f64) -> Self {
        Composite {
            rel_tol: cfg.rel_tol,
            abs_tol: cfg.rel_tol * 1e-3 * scale.abs(),
            max_levels: cfg.max_levels.clamp(4, 10),
            min_level: 3,
            max_bisections: 12,
        }
    }
}

/// Romberg on `[a, b]`, bisecting when a piece does not converge within the
/// level budget.
fn adaptive<F>(g: &mut F, a: f64, b: f64, abs_tol: f64, c: &Composite, depth: u32) -> Result<Estimate>
where
    F: FnMut(f64) -> f64,
{
    let est = romberg_with(&mut *g, a, b, c.rel_tol, abs_tol, c.min_level, c.max_levels)?;
    if est.converged || depth >= c.max_bisections {
        return Ok(est);
    }
    let m = 0.5 * (a + b);
    let mut out = adaptive(g, a, m, 0.5 * abs_tol, c, depth + 1)?;
    out.add(adaptive(g, m, b, 0.5 * abs_tol, c, depth + 1)?);
    out.evals += est.evals;
    Ok(out)
}

/// Integral over `[from, to]` graded geometrically toward `from`, where the
/// integrand varies on length scale `scale` (zero for a true singularity).
fn graded<F>(g: &mut F, from: f64, to: f64, scale: f64, abs_tol: f64, c: &Composite) -> Result<Estimate>
where
    F: FnMut(f64) -> f64,
{
    let len = (to - from).abs();
    let floor = (0.25 * scale).max(1e-10 * len);
    let mut out = Estimate::zero();
    let mut outer = len;
    let piece_tol = |w: f64| abs_tol * w / len;
    let dir = if to >= from { 1.0 } else { -1.0 };
    while outer > floor {
        let inner = 0.5 * outer;
        let (x0, x1) = (from + dir * inner, from + dir * outer);
        let (lo, hi) = if dir > 0.0 { (x0, x1) } else { (x1, x0) };
        out.add(adaptive(g, lo, hi, piece_tol(outer - inner), c, 0)?);
        outer = inner;
    }
    let (lo, hi) = if dir > 0.0 {
        (from, from + outer)
    } else {
        (from - outer, from)
    };
    out.add(adaptive(g, lo, hi, piece_tol(outer), c, 0)?);
    Ok(out)
}

/// Composite integral over `[a, b]` split at `breaks` (kinks of the
/// integrand), with geometric grading toward `singular.0` when the integrand
/// varies there on the scale `singular.1`.
pub(crate) fn integrate_pieces<F>(
    mut g: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    singular: Option<(f64, f64)>,
    c: &Composite,
) -> Result<Estimate>
where
    F: FnMut(f64) -> f64,
{
    let total = b - a;
    if total <= 0.0 {
        return Ok(Estimate::zero());
    }
    let mut pts = [0.0f64; 12];
    let mut n = 0;
    pts[n] = a;
    n += 1;
    for &x in breaks.iter().chain(singular.iter().map(|s| &s.0)) {
        if a < x && x < b && n < pts.len() - 1 {
            pts[n] = x;
            n += 1;
        }
    }
    pts[n] = b;
    n += 1;
    let pts = &mut pts[..n];
    pts.sort_by(f64::total_cmp);

    let mut out = Estimate::zero();
    for w in pts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let tol = c.abs_tol * (hi - lo) / total;
        let near = |p: f64| match singular {
            Some((x, s)) if x == p && s < hi - lo => Some(s),
            _ => None,
        };
        let est = match (near(lo), near(hi)) {
            (None, None) => adaptive(&mut g, lo, hi, tol, c, 0)?,
            (Some(s), None) => graded(&mut g, lo, hi, s, tol, c)?,
            (None, Some(s)) => graded(&mut g, hi, lo, s, tol, c)?,
            (Some(s), Some(_)) => {
                let m = 0.5 * (lo + hi);
                let mut e = graded(&mut g, lo, m, s, 0.5 * tol, c)?;
                e.add(graded(&mut g, hi, m, s, 0.5 * tol, c)?);
                e
            }
        };
        out.add(est);
    }
    Ok(out)
}

/// `n`-point Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out.reverse();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_2, LN_2};

    #[test]
    fn diff_apply_examples() {
        assert_eq!(diff_apply(|v| v[0], &[(1.0, 0.0)]).unwrap(), 1.0);
        assert_eq!(diff_apply(|v| v[0] * v[1], &[(1.0, 0.0), (1.0, 0.0)]).unwrap(), 1.0);
        let s = diff_apply(|v| (v[0] + v[1]).sin(), &[(FRAC_PI_2, 0.0), (FRAC_PI_2, 0.0)]).unwrap();
        assert!((s + 2.0).abs() < 1e-15);
        assert!(diff_apply(|v| 1.0 / v[0], &[(1.0, 0.0)]).is_err());
    }

    #[test]
    fn romberg_examples() {
        let cfg = QuadratureConfig::default();
        let sq = romberg(|x| x * x, 0.0, 1.0, &cfg).unwrap();
        assert!(sq.converged && (sq.value - 1.0 / 3.0).abs() < 1e-12);
        let one = romberg(|_| 1.0, 0.0, 1.0, &cfg).unwrap();
        assert_eq!(one.value, 1.0);
        let l = romberg(|x| (1.0 + x).ln(), 0.0, 1.0, &cfg).unwrap();
        let exact = 2.0 * LN_2 - 1.0;
        assert!(l.converged && ((l.value - exact) / exact).abs() <= cfg.rel_tol);
        assert!(matches!(
            romberg(|x| 1.0 / x, 0.0, 1.0, &cfg),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn romberg_flags_non_convergence() {
        let cfg = QuadratureConfig {
            rel_tol: 1e-14,
            max_levels: 4,
        };
        let e = romberg(|x| x.sqrt(), 0.0, 1.0, &cfg).unwrap();
        assert!(!e.converged);
        assert!((e.value - 2.0 / 3.0).abs() < 1e-2);
    }

    #[test]
    fn graded_pieces_handle_endpoint_singularities() {
        let c = Composite::new(&QuadratureConfig::default(), 1.0);
        // x ln x on [0, 1] = -1/4
        let e = integrate_pieces(
            |x| if x == 0.0 { 0.0 } else { x * x.ln() },
            0.0,
            1.0,
            &[],
            Some((0.0, 0.0)),
            &c,
        )
        .unwrap();
        assert!((e.value + 0.25).abs() < 1e-10, "{}", e.value);
        // 1/sqrt(x^2 + b^2) around 0, b small
        let b: f64 = 1e-4;
        let e = integrate_pieces(|x| 1.0 / (x * x + b * b).sqrt(), -1.0, 2.0, &[], Some((0.0, b)), &c).unwrap();
        let exact = (1.0 / b).asinh() + (2.0 / b).asinh();
        assert!(((e.value - exact) / exact).abs() < 1e-9);
        // kink at 0.3
        let e = integrate_pieces(|x| (x - 0.3).abs(), 0.0, 1.0, &[0.3], None, &c).unwrap();
        assert!((e.value - (0.045 + 0.245)).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [1, 2, 5, 10, 16] {
            let rule = gauss_legendre(n);
            let wsum: f64 = rule.iter().map(|p| p.1).sum();
            assert!((wsum - 2.0).abs() < 1e-13);
            // exact up to degree 2n - 1
            let deg = 2 * n - 2;
            let q: f64 = rule.iter().map(|&(x, w)| w * x.powi(deg as i32)).sum();
            assert!((q - 2.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n={} q={}", n, q);
        }
    }
}
