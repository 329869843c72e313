//! Stationary randomized policies: inter-delivery law, age at delivery and
//! the resulting weighted-sum average age.
//!
//! Every per-user formula is written for user 1; user 2 is handled by
//! relabelling the actions and the channel.

use crate::aoi::{AgeWeights, User};
use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::policy::ActionWeights;

/// Below this, `mu3` and `eps_i - eps12` count as zero and the reduced
/// branches are used.
const REDUCTION_EPS: f64 = 1e-12;

/// Relative gap under which the printed closed form is treated as `0/0`.
const SINGULAR_GAP: f64 = 1e-6;

/// The quantities one user sees: its own direct probability, the other
/// user's, the coded probability and the two erasure probabilities.
#[derive(Debug, Clone, Copy)]
struct View {
    mu: f64,
    mu_other: f64,
    mu3: f64,
    eps: f64,
    eps12: f64,
}

impl View {
    fn new(user: User, mu: &ActionWeights, params: &ChannelParams) -> Result<Self> {
        let v = Self {
            mu: mu.direct(user),
            mu_other: mu.direct(user.other()),
            mu3: mu.mu3(),
            eps: params.eps(user),
            eps12: params.eps12(),
        };
        if v.mu <= 0.0 {
            return Err(Error::NeverServed(user.number()));
        }
        Ok(v)
    }

    /// `mu (eps - eps12)`: a packet for this user lands in its overheard queue.
    fn q(&self) -> f64 {
        self.mu * (self.eps - self.eps12)
    }

    /// `mu eps12 + mu_other + mu3`: nothing happens while the queue is empty.
    fn x(&self) -> f64 {
        self.mu * self.eps12 + self.mu_other + self.mu3
    }

    /// `mu eps + mu_other + mu3 eps`: no delivery while the queue is full.
    fn y(&self) -> f64 {
        self.mu * self.eps + self.mu_other + self.mu3 * self.eps
    }

    /// `mu eps12 + mu_other + mu3 eps`: the queued packet neither leaves nor
    /// is replaced.
    fn z(&self) -> f64 {
        self.mu * self.eps12 + self.mu_other + self.mu3 * self.eps
    }

    /// `1 - x = mu (1 - eps12)`, computed without cancellation.
    fn one_minus_x(&self) -> f64 {
        self.mu * (1.0 - self.eps12)
    }

    /// `1 - y = (mu + mu3)(1 - eps)`.
    fn one_minus_y(&self) -> f64 {
        (self.mu + self.mu3) * (1.0 - self.eps)
    }

    /// `1 - z = mu (1 - eps12) + mu3 (1 - eps)`.
    fn one_minus_z(&self) -> f64 {
        self.mu * (1.0 - self.eps12) + self.mu3 * (1.0 - self.eps)
    }

    /// Whether the printed forms are numerically `0/0` here.
    fn near_singular(&self) -> bool {
        let p = self.mu3 * (1.0 - self.eps);
        let q = self.q();
        p + q == 0.0 || (p - q).abs() / (p + q) < SINGULAR_GAP
    }
}

/// Constants of the inter-delivery law `P(I = l) = delta x^(l-1) + beta y^(l-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterDeliveryParams {
    pub x1: f64,
    pub y1: f64,
    /// Only used by the path decomposition the law is derived from.
    pub z1: f64,
    pub delta1: f64,
    pub beta1: f64,
}

/// Inter-delivery constants for user 1.
pub fn interdelivery_params(mu: &ActionWeights, params: &ChannelParams) -> Result<InterDeliveryParams> {
    interdelivery_params_for(User::One, mu, params)
}

pub fn interdelivery_params_for(
    user: User,
    mu: &ActionWeights,
    params: &ChannelParams,
) -> Result<InterDeliveryParams> {
    let v = View::new(user, mu, params)?;
    let (x1, y1, z1) = (v.x(), v.y(), v.z());
    let (delta1, beta1) = if (v.eps - v.eps12).abs() < REDUCTION_EPS {
        (v.one_minus_x(), 0.0)
    } else if v.mu3 < REDUCTION_EPS {
        (0.0, v.mu * (1.0 - v.eps))
    } else {
        let den = -v.q() + v.mu3 * (1.0 - v.eps);
        if den.abs() < REDUCTION_EPS {
            return Err(Error::Degenerate(format!(
                "x = y for user {}: mu3 (1 - eps) = mu (eps - eps12)",
                user.number()
            )));
        }
        let delta = v.one_minus_x() + v.mu * v.q() * (1.0 - v.eps12) / den;
        let beta = -v.q() * (1.0 - v.eps) * (v.mu + v.mu3) / den;
        (delta, beta)
    };
    Ok(InterDeliveryParams { x1, y1, z1, delta1, beta1 })
}

/// `P(I = ell)` for `ell >= 1`; zero for `ell = 0`.
pub fn inter_delivery_pmf(idp: &InterDeliveryParams, ell: u64) -> f64 {
    if ell == 0 {
        return 0.0;
    }
    let n = (ell - 1) as i32;
    let pow = |b: f64| if n == 0 { 1.0 } else { b.powi(n) };
    idp.delta1 * pow(idp.x1) + idp.beta1 * pow(idp.y1)
}

/// `(E[I], E[I^2])`.
pub fn inter_delivery_moments(idp: &InterDeliveryParams) -> Result<(f64, f64)> {
    let (x, y) = (idp.x1, idp.y1);
    if x >= 1.0 || y >= 1.0 {
        return Err(Error::Degenerate("a geometric base equals 1; no deliveries".into()));
    }
    let mean = idp.delta1 / (1.0 - x).powi(2) + idp.beta1 / (1.0 - y).powi(2);
    let second = idp.delta1 * (1.0 + x) / (1.0 - x).powi(3) + idp.beta1 * (1.0 + y) / (1.0 - y).powi(3);
    Ok((mean, second))
}

/// `(E[I], E[I^2])` rewritten so that nothing divides by `x - y`. With
/// `a = 1 - x`, `b = 1 - y`, `q = mu (eps - eps12)`:
///
/// ```text
/// E[I]   = 1/a + q / (a b)
/// E[I^2] = (1 + x)/a^2 + q (3 - x - y - x y) / (a b)^2
/// ```
fn stable_moments(v: &View) -> (f64, f64) {
    let (x, y) = (v.x(), v.y());
    let (a, b, q) = (v.one_minus_x(), v.one_minus_y(), v.q());
    let mean = 1.0 / a + q / (a * b);
    let second = (1.0 + x) / (a * a) + q * (3.0 - x - y - x * y) / (a * a * b * b);
    (mean, second)
}

/// Per-slot delivery statistics of one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeliveryAgeLaw {
    /// `P(h(k) = 1) = mu (1 - eps)`.
    pub p_fresh: f64,
    /// `P(h(k) = 2)`; `P(h(k) = d) = p_coded_first * ratio^(d-2)` for `d >= 2`.
    pub p_coded_first: f64,
    /// `z`.
    pub ratio: f64,
    /// Probability that a delivery happens in a slot.
    pub p_delivery: f64,
}

impl DeliveryAgeLaw {
    /// Probability that a slot delivers a packet of age `d`.
    pub fn slot_prob(&self, d: u64) -> f64 {
        match d {
            0 => 0.0,
            1 => self.p_fresh,
            _ => self.p_coded_first * self.ratio.powi((d - 2) as i32),
        }
    }

    /// `P(D = d)`.
    pub fn pmf(&self, d: u64) -> f64 {
        self.slot_prob(d) / self.p_delivery
    }
}

pub fn delivery_age_law(user: User, mu: &ActionWeights, params: &ChannelParams) -> Result<DeliveryAgeLaw> {
    let v = View::new(user, mu, params)?;
    let p_fresh = v.mu * (1.0 - v.eps);
    Ok(DeliveryAgeLaw {
        p_fresh,
        p_coded_first: v.mu3 * p_fresh * (v.eps - v.eps12),
        ratio: v.z(),
        p_delivery: p_fresh * (v.mu + v.mu3) * (1.0 - v.eps12) / v.one_minus_z(),
    })
}

/// `E[D] = 1 + mu3 (eps - eps12) / ((mu + mu3)(1 - eps12)(1 - z))`.
pub fn expected_delivery_age(user: User, mu: &ActionWeights, params: &ChannelParams) -> Result<f64> {
    let v = View::new(user, mu, params)?;
    let den = (v.mu + v.mu3) * (1.0 - v.eps12) * v.one_minus_z();
    if den <= 0.0 {
        return Err(Error::NeverServed(user.number()));
    }
    Ok(1.0 + v.mu3 * (v.eps - v.eps12) / den)
}

/// Average age of one user as printed: `A/B + C`.
fn printed_average_age(v: &View) -> f64 {
    let (mu, mu3, eps, e12) = (v.mu, v.mu3, v.eps, v.eps12);
    let fresh = mu * (1.0 - e12);
    let coded = (mu + mu3) * (1.0 - eps);
    let a = mu3 * (1.0 - eps) / (fresh * fresh) - mu * (eps - e12) / (coded * coded);
    let b = mu3 * (1.0 - eps) / fresh - mu * (eps - e12) / coded;
    let c = mu3 * (eps - e12) / ((mu + mu3) * (1.0 - e12) * (fresh + mu3 * (1.0 - eps)));
    a / b + c
}

/// Renewal-reward assembly `E[I^2] / (2 E[I]) + E[D] - 1/2`.
fn assembled_average_age(mean: f64, second: f64, delivery_age: f64) -> f64 {
    second / (2.0 * mean) + delivery_age - 0.5
}

/// Long-run average age of `user` under a randomized policy.
///
/// Uses the printed closed form away from its removable singularity
/// `mu3 (1 - eps) = mu (eps - eps12)`, and the singularity-free moments
/// near it. Without coding this is `1 / (mu (1 - eps))`.
pub fn randomized_average_age(user: User, mu: &ActionWeights, params: &ChannelParams) -> Result<f64> {
    let v = View::new(user, mu, params)?;
    if v.mu3 < REDUCTION_EPS {
        return Ok(1.0 / (v.mu * (1.0 - v.eps)));
    }
    if v.near_singular() {
        let (mean, second) = stable_moments(&v);
        return Ok(assembled_average_age(mean, second, expected_delivery_age(user, mu, params)?));
    }
    Ok(printed_average_age(&v))
}

/// Weighted-sum average age `1/2 sum_i alpha_i age_i` of a randomized policy.
pub fn randomized_ewsaoi(alphas: &AgeWeights, mu: &ActionWeights, params: &ChannelParams) -> Result<f64> {
    let mut j = 0.0;
    for user in User::BOTH {
        j += alphas.alpha(user) * randomized_average_age(user, mu, params)?;
    }
    Ok(j / 2.0)
}

/// Same quantity, assembled from the inter-delivery moments and the mean
/// age at delivery. Falls back to the singularity-free moments where the
/// inter-delivery constants are degenerate.
pub fn randomized_ewsaoi_assembled(alphas: &AgeWeights, mu: &ActionWeights, params: &ChannelParams) -> Result<f64> {
    let mut j = 0.0;
    for user in User::BOTH {
        let v = View::new(user, mu, params)?;
        let (mean, second) = match interdelivery_params_for(user, mu, params) {
            Ok(idp) if !v.near_singular() || v.mu3 < REDUCTION_EPS || (v.eps - v.eps12).abs() < REDUCTION_EPS => {
                inter_delivery_moments(&idp)?
            }
            Ok(_) | Err(Error::Degenerate(_)) => stable_moments(&v),
            Err(e) => return Err(e),
        };
        let d = expected_delivery_age(user, mu, params)?;
        j += alphas.alpha(user) * assembled_average_age(mean, second, d);
    }
    Ok(j / 2.0)
}

/// Symmetric channel and weights, `mu1 = mu2 = mu`, `mu3 = 1 - 2 mu`:
///
/// ```text
/// alpha (1 - eps - mu (eps12 - 2 eps + 1)) / (mu (1 - mu)(1 - eps)(1 - eps12))
/// ```
pub fn symmetric_ewsaoi(alpha: f64, mu: f64, eps: f64, eps12: f64) -> Result<f64> {
    if !(mu > 0.0 && mu <= 0.5) {
        return Err(Error::InvalidActionWeights(format!("mu = {mu} is not in (0, 1/2]")));
    }
    if !(0.0..1.0).contains(&eps) || !(0.0..=eps).contains(&eps12) {
        return Err(Error::InvalidChannel(format!("need 0 <= eps12 <= eps < 1, got eps = {eps}, eps12 = {eps12}")));
    }
    let num = 1.0 - eps - mu * (eps12 - 2.0 * eps + 1.0);
    Ok(alpha * num / (mu * (1.0 - mu) * (1.0 - eps) * (1.0 - eps12)))
}

/// Whether some coded randomized policy strictly beats every uncoded one on
/// a symmetric channel: `eps12 - 2 eps + 1 < 0`. This is the same condition
/// as `Pr(Z1 = 1, Z2 = 1) < 0`, so it only holds for parameter sets that
/// specify the overhearing probabilities but no joint law.
pub fn coding_beneficial(eps: f64, eps12: f64) -> bool {
    eps12 - 2.0 * eps + 1.0 < 0.0
}

/// Minimizer of [`symmetric_ewsaoi`] over `mu in (0, 1/2]`.
pub fn optimal_mu_symmetric(eps: f64, eps12: f64) -> f64 {
    if coding_beneficial(eps, eps12) {
        let s = (1.0 - eps).sqrt();
        s / (s + (eps - eps12).sqrt())
    } else {
        0.5
    }
}
