//! Randomized comparison of the panel-pair integrals against the
//! brute-force oracle.

use std::fmt;

use gbem_core::geometry::{Axis, Interval, Rect};
use gbem_core::kernels::{oracle_pair_integral, q_pair_integral, u_pair_integral, QuadratureConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Relative tolerance for separated pairs.
pub const DISJOINT_TOL: f64 = 1e-6;
/// Relative tolerance for pairs that touch or coincide.
pub const SINGULAR_TOL: f64 = 1e-3;
/// Oracle refinement depth.
pub const ORACLE_DEPTH: u32 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Case {
    CoplanarDisjoint,
    CoplanarAdjacent,
    CoplanarSelf,
    OffsetDisjoint,
    /// Parallel planes closer than a hundredth of the panel size.
    OffsetNear,
    OrthogonalDisjoint,
    /// Orthogonal panels sharing part of an edge line.
    OrthogonalAdjacent,
    /// Orthogonal panels meeting along a line interior to one of them.
    OrthogonalCrossing,
}

impl Case {
    pub const ALL: [Case; 8] = [
        Case::CoplanarDisjoint,
        Case::CoplanarAdjacent,
        Case::CoplanarSelf,
        Case::OffsetDisjoint,
        Case::OffsetNear,
        Case::OrthogonalDisjoint,
        Case::OrthogonalAdjacent,
        Case::OrthogonalCrossing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Case::CoplanarDisjoint => "coplanar-disjoint",
            Case::CoplanarAdjacent => "coplanar-adjacent",
            Case::CoplanarSelf => "coplanar-self",
            Case::OffsetDisjoint => "offset-disjoint",
            Case::OffsetNear => "offset-near",
            Case::OrthogonalDisjoint => "orthogonal-disjoint",
            Case::OrthogonalAdjacent => "orthogonal-adjacent",
            Case::OrthogonalCrossing => "orthogonal-crossing",
        }
    }

    pub fn tolerance(self) -> f64 {
        match self {
            Case::CoplanarDisjoint | Case::OffsetDisjoint | Case::OffsetNear | Case::OrthogonalDisjoint => DISJOINT_TOL,
            _ => SINGULAR_TOL,
        }
    }
}

/// Rectangle in a frame where the first panel lies in the plane z = 0.
/// `normal` is the canonical normal axis, the spans are along the other two
/// canonical axes in ascending order.
struct Local {
    normal: usize,
    level: f64,
    a: (f64, f64),
    b: (f64, f64),
    sign: f64,
}

/// Maps the canonical frame onto the world by the cyclic axis shift `shift`
/// and the translation `offset`.
fn place(r: &Local, shift: usize, offset: [f64; 3]) -> Rect {
    let others: Vec<usize> = (0..3).filter(|&k| k != r.normal).collect();
    let world = |k: usize| (k + shift) % 3;
    let n = world(r.normal);
    let mut spans = [(0.0, 0.0); 3];
    spans[world(others[0])] = r.a;
    spans[world(others[1])] = r.b;
    let rest: Vec<usize> = (0..3).filter(|&k| k != n).collect();
    let iv = |k: usize| Interval::new(spans[k].0 + offset[k], spans[k].1 + offset[k]);
    Rect::new(Axis::from_index(n), r.level + offset[n], iv(rest[0]), iv(rest[1]), r.sign)
        .expect("generated rectangles are nondegenerate")
}

fn sign(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

/// An interval of length `len` starting anywhere that still overlaps
/// `[lo, hi]` by a positive amount.
fn overlapping(rng: &mut ChaCha8Rng, lo: f64, hi: f64, len: f64) -> (f64, f64) {
    let start = rng.gen_range(lo - 0.9 * len..hi - 0.1 * (hi - lo));
    (start, start + len)
}

/// One random pair for `case`.
pub fn sample_pair(case: Case, rng: &mut ChaCha8Rng) -> (Rect, Rect) {
    let (w1, h1) = (rng.gen_range(0.2..2.0), rng.gen_range(0.2..2.0));
    let (w2, h2) = (rng.gen_range(0.2..2.0), rng.gen_range(0.2..2.0));
    let first = Local {
        normal: 2,
        level: 0.0,
        a: (0.0, w1),
        b: (0.0, h1),
        sign: sign(rng),
    };
    let second = match case {
        Case::CoplanarSelf => Local { sign: first.sign, ..first },
        Case::CoplanarDisjoint => {
            let gap = rng.gen_range(0.05..1.5);
            let y = rng.gen_range(-2.0..2.0);
            Local {
                normal: 2,
                level: 0.0,
                a: (w1 + gap, w1 + gap + w2),
                b: (y, y + h2),
                sign: sign(rng),
            }
        }
        Case::CoplanarAdjacent => Local {
            normal: 2,
            level: 0.0,
            a: (w1, w1 + w2),
            b: overlapping(rng, 0.0, h1, h2),
            sign: sign(rng),
        },
        Case::OffsetDisjoint | Case::OffsetNear => {
            let z = if case == Case::OffsetNear {
                rng.gen_range(0.001..0.01)
            } else {
                rng.gen_range(0.1..2.0)
            };
            let x = rng.gen_range(-1.5..1.5);
            let y = rng.gen_range(-1.5..1.5);
            Local {
                normal: 2,
                level: z * sign(rng),
                a: (x, x + w2),
                b: (y, y + h2),
                sign: sign(rng),
            }
        }
        Case::OrthogonalDisjoint => {
            // plane x = w1 + gap, spans (y, z) with z reaching either side
            let gap = rng.gen_range(0.05..1.5);
            let y = rng.gen_range(-2.0..2.0);
            let z = rng.gen_range(-2.0..1.0);
            Local {
                normal: 0,
                level: w1 + gap,
                a: (y, y + h2),
                b: (z, z + w2),
                sign: sign(rng),
            }
        }
        Case::OrthogonalAdjacent => {
            let z = if rng.gen_bool(0.5) { (0.0, w2) } else { (-w2, 0.0) };
            Local {
                normal: 0,
                level: w1,
                a: overlapping(rng, 0.0, h1, h2),
                b: z,
                sign: sign(rng),
            }
        }
        Case::OrthogonalCrossing => {
            let z = if rng.gen_bool(0.5) { (0.0, w2) } else { (-w2, 0.0) };
            Local {
                normal: 0,
                level: rng.gen_range(0.1..0.9) * w1,
                a: overlapping(rng, 0.0, h1, h2),
                b: z,
                sign: sign(rng),
            }
        }
    };
    let shift = rng.gen_range(0..3);
    let offset = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
    let (mut ii, mut ij) = (place(&first, shift, offset), place(&second, shift, offset));
    if rng.gen_bool(0.5) {
        std::mem::swap(&mut ii, &mut ij);
    }
    (ii, ij)
}

/// `|value - reference| / |reference|`, or the absolute error when the
/// reference vanishes.
pub fn relative_error(value: f64, reference: f64) -> f64 {
    let d = (value - reference).abs();
    if reference == 0.0 {
        d
    } else {
        d / reference.abs()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseResult {
    pub case: Case,
    pub pairs: usize,
    pub max_error_u: f64,
    pub max_error_q: f64,
    pub tolerance: f64,
}

impl CaseResult {
    pub fn passed(&self) -> bool {
        self.max_error_u <= self.tolerance && self.max_error_q <= self.tolerance
    }
}

impl fmt::Display for CaseResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<20} pairs {:>5}  max rel err U {:.3e}  Q {:.3e}  tol {:.0e}  {}",
            self.case.name(),
            self.pairs,
            self.max_error_u,
            self.max_error_q,
            self.tolerance,
            if self.passed() { "ok" } else { "FAIL" }
        )
    }
}

/// Runs `pairs` random pairs of one case. Kernel failures count as an
/// infinite error.
pub fn run_case(case: Case, pairs: usize, seed: u64, depth: u32) -> CaseResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (case as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let cfg = QuadratureConfig::default();
    let (mut eu, mut eq) = (0.0f64, 0.0f64);
    for _ in 0..pairs {
        let (ii, ij) = sample_pair(case, &mut rng);
        let u = u_pair_integral(&ii, &ij, &cfg).map_or(f64::INFINITY, |v| v.value);
        let q = q_pair_integral(&ii, &ij, &cfg).map_or(f64::INFINITY, |v| v.value);
        let uo = oracle_pair_integral(gbem_core::kernels::KernelKind::SingleLayerU, &ii, &ij, depth);
        let qo = oracle_pair_integral(gbem_core::kernels::KernelKind::DoubleLayerQ, &ii, &ij, depth);
        // NaN compares false and would be dropped by `max`
        let worst = |acc: f64, e: f64| if e.is_nan() { f64::INFINITY } else { acc.max(e) };
        eu = worst(eu, relative_error(u, uo));
        eq = worst(eq, relative_error(q, qo));
    }
    CaseResult {
        case,
        pairs,
        max_error_u: eu,
        max_error_q: eq,
        tolerance: case.tolerance(),
    }
}

pub fn run_all(pairs: usize, seed: u64, depth: u32) -> Vec<CaseResult> {
    Case::ALL.iter().map(|&c| run_case(c, pairs, seed, depth)).collect()
}
