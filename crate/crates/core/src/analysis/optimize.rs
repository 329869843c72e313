//! Deterministic minimization over the action simplex.
//!
//! Stage one evaluates a grid of step 0.01 over `mu1, mu2 >= 0.01`,
//! `mu3 = 1 - mu1 - mu2 >= 0`. Stage two runs golden-section line searches
//! from the best grid point along `(1, 0, -1)`, `(0, 1, -1)` and
//! `(1, -1, 0)`, starting with a bracket of one grid step and shrinking it
//! tenfold whenever a full round moves the point less than a tenth of the
//! bracket, until the bracket is below the requested tolerance.

use crate::aoi::AgeWeights;
use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::policy::ActionWeights;

use super::maxweight::mw_upper_bound;
use super::randomized::randomized_ewsaoi;

const GRID: u32 = 100;
const MU_FLOOR: f64 = 1e-9;
const MAX_ROUNDS: usize = 10_000;
const DIRECTIONS: [[f64; 2]; 3] = [[1.0, 0.0], [0.0, 1.0], [1.0, -1.0]];
const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptimum {
    pub mu: ActionWeights,
    pub value: f64,
}

fn point(m1: f64, m2: f64) -> Option<ActionWeights> {
    if m1 < MU_FLOOR || m2 < MU_FLOOR || m1 + m2 > 1.0 {
        return None;
    }
    ActionWeights::new(m1, m2, 1.0 - m1 - m2).ok()
}

/// Golden-section search of `g` on `[lo, hi]`; returns `(t, g(t))` for the
/// best point seen, including `t = 0` with value `g0`.
fn golden<G: FnMut(f64) -> f64>(mut g: G, lo: f64, hi: f64, g0: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut best = (0.0, g0);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = g(c);
    let mut fd = g(d);
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = g(d);
        }
        for (t, v) in [(c, fc), (d, fd)] {
            if v < best.1 {
                best = (t, v);
            }
        }
    }
    best
}

/// Minimizes `f` over the open simplex interior in `(mu1, mu2)` and the
/// closed face `mu3 = 0`. Points where `f` fails count as `+inf`.
pub fn minimize_on_simplex<F>(f: F, tolerance: f64) -> Result<SimplexOptimum>
where
    F: Fn(&ActionWeights) -> Result<f64>,
{
    if !(tolerance > 0.0) {
        return Err(Error::InvalidConfig(format!("tolerance must be positive, got {tolerance}")));
    }
    let eval = |m1: f64, m2: f64| -> f64 {
        point(m1, m2).and_then(|p| f(&p).ok()).filter(|v| v.is_finite()).unwrap_or(f64::INFINITY)
    };

    let mut best = (0.0, 0.0, f64::INFINITY);
    for i in 1..GRID {
        for j in 1..=(GRID - i) {
            let (m1, m2) = (f64::from(i) / f64::from(GRID), f64::from(j) / f64::from(GRID));
            let v = eval(m1, m2);
            if v < best.2 {
                best = (m1, m2, v);
            }
        }
    }
    if !best.2.is_finite() {
        return Err(Error::Degenerate("objective is infinite on the whole grid".into()));
    }

    let (mut m1, mut m2, mut value) = best;
    let mut bracket = 1.0 / f64::from(GRID);
    for _ in 0..MAX_ROUNDS {
        if bracket < tolerance {
            break;
        }
        let mut moved: f64 = 0.0;
        for dir in DIRECTIONS {
            let (lo, hi) = feasible_range(m1, m2, dir, bracket);
            if hi - lo <= 0.0 {
                continue;
            }
            let (t, v) = golden(|t| eval(m1 + t * dir[0], m2 + t * dir[1]), lo, hi, value, tolerance * 1e-3);
            if v < value {
                m1 += t * dir[0];
                m2 += t * dir[1];
                value = v;
                moved = moved.max(t.abs());
            }
        }
        if moved < bracket / 10.0 {
            bracket /= 10.0;
        }
    }
    let mu = point(m1, m2).expect("search stays feasible");
    Ok(SimplexOptimum { mu, value })
}

/// Range of `t` in `[-bracket, bracket]` keeping `(m1, m2) + t dir` feasible.
fn feasible_range(m1: f64, m2: f64, dir: [f64; 2], bracket: f64) -> (f64, f64) {
    let mut lo = -bracket;
    let mut hi = bracket;
    for (m, d) in [(m1, dir[0]), (m2, dir[1])] {
        // m + t d >= MU_FLOOR
        if d > 0.0 {
            lo = lo.max((MU_FLOOR - m) / d);
        } else if d < 0.0 {
            hi = hi.min((MU_FLOOR - m) / d);
        }
    }
    // m1 + m2 + t (d0 + d1) <= 1
    let s = dir[0] + dir[1];
    if s > 0.0 {
        hi = hi.min((1.0 - m1 - m2) / s);
    }
    (lo, hi)
}

/// Best coded randomized policy and its weighted-sum average age.
pub fn optimize_randomized(alphas: &AgeWeights, params: &ChannelParams, tolerance: f64) -> Result<SimplexOptimum> {
    minimize_on_simplex(|mu| randomized_ewsaoi(alphas, mu, params), tolerance)
}

/// Smallest Max-Weight upper bound over the reference policy.
pub fn min_mw_upper_bound(alphas: &AgeWeights, params: &ChannelParams, tolerance: f64) -> Result<SimplexOptimum> {
    minimize_on_simplex(|mu| mw_upper_bound(alphas, mu, params), tolerance)
}

/// Best uncoded randomized policy by golden-section search over `mu1`.
pub fn optimize_uncoded(alphas: &AgeWeights, params: &ChannelParams, tolerance: f64) -> Result<SimplexOptimum> {
    if !(tolerance > 0.0) {
        return Err(Error::InvalidConfig(format!("tolerance must be positive, got {tolerance}")));
    }
    let eval = |m1: f64| {
        ActionWeights::uncoded(m1)
            .and_then(|mu| randomized_ewsaoi(alphas, &mu, params))
            .unwrap_or(f64::INFINITY)
    };
    let g0 = eval(0.5);
    let (t, value) = golden(|t| eval(0.5 + t), MU_FLOOR - 0.5, 0.5 - MU_FLOOR, g0, tolerance * 1e-3);
    Ok(SimplexOptimum { mu: ActionWeights::uncoded(0.5 + t)?, value })
}

/// `mu_i` proportional to `sqrt(alpha_i / (1 - eps_i))`, the exact uncoded
/// optimum.
pub fn uncoded_optimum_closed_form(alphas: &AgeWeights, params: &ChannelParams) -> Result<SimplexOptimum> {
    let r1 = (alphas.alpha1() / (1.0 - params.eps1())).sqrt();
    let r2 = (alphas.alpha2() / (1.0 - params.eps2())).sqrt();
    let mu = ActionWeights::uncoded(r1 / (r1 + r2))?;
    Ok(SimplexOptimum { mu, value: randomized_ewsaoi(alphas, &mu, params)? })
}
