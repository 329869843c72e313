//! Policy-independent lower bound and the broadcast capacity region.

use crate::aoi::AgeWeights;
use crate::channel::ChannelParams;

/// Lower bound on the weighted-sum average age of any policy, coded or not:
///
/// ```text
/// 1/4 * ( (sum_i sqrt(alpha_i (2 - eps12 - eps_other)))^2
///         / ((1 - eps12)(2 - eps1 - eps2)) + 1 )
/// ```
pub fn lower_bound(alphas: &AgeWeights, params: &ChannelParams) -> f64 {
    let (e1, e2, e12) = (params.eps1(), params.eps2(), params.eps12());
    let k1 = 2.0 - e2 - e12;
    let k2 = 2.0 - e1 - e12;
    let k3 = (1.0 - e12) * (2.0 - e1 - e2);
    let root = (alphas.alpha1() * k1).sqrt() + (alphas.alpha2() * k2).sqrt();
    (root * root / k3 + 1.0) / 4.0
}

/// Left-hand sides of the two capacity inequalities minus one; the pair is
/// achievable iff both are `<= 0`.
pub fn capacity_region_excess(r1: f64, r2: f64, params: &ChannelParams) -> [f64; 2] {
    let (e1, e2, e12) = (params.eps1(), params.eps2(), params.eps12());
    [r1 / (1.0 - e1) + r2 / (1.0 - e12) - 1.0, r1 / (1.0 - e12) + r2 / (1.0 - e2) - 1.0]
}

pub fn capacity_region_contains(r1: f64, r2: f64, params: &ChannelParams) -> bool {
    r1 >= 0.0 && r2 >= 0.0 && capacity_region_excess(r1, r2, params).iter().all(|&e| e <= 0.0)
}
