//! Max-Weight analysis: one-slot Lyapunov drift and the upper bound built
//! from a randomized reference policy.

use crate::aoi::{Action, AgeWeights, AoiState, User};
use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::policy::ActionWeights;

/// Stationary probability that a buffer-one queue is empty, when arrivals
/// and departures are independent Bernoulli streams of rates `lambda` and
/// `mu`: `mu (1 - lambda) / (mu + lambda - mu lambda)`.
pub fn empty_queue_prob(lambda: f64, mu: f64) -> Result<f64> {
    for (name, v) in [("arrival", lambda), ("departure", mu)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Degenerate(format!("{name} rate {v} is not in [0, 1]")));
        }
    }
    let den = mu + lambda - mu * lambda;
    if den <= 0.0 {
        return Err(Error::Degenerate("queue with no arrivals and no departures".into()));
    }
    Ok(mu * (1.0 - lambda) / den)
}

/// Probability that user `i`'s overheard queue is non-empty under the
/// randomized reference policy, with arrival rate `mu_i (eps_i - eps12)` and
/// departure rate `mu3 (1 - eps_i)`.
pub fn q2_nonempty_prob(user: User, mu: &ActionWeights, params: &ChannelParams) -> Result<f64> {
    let lambda = mu.direct(user) * params.overhear(user);
    let departure = mu.mu3() * (1.0 - params.eps(user));
    Ok(1.0 - empty_queue_prob(lambda, departure)?)
}

/// The same probability written out in full.
fn q2_nonempty_direct(mu_i: f64, mu3: f64, eps: f64, eps12: f64) -> f64 {
    let arrive = mu_i * (eps - eps12);
    arrive / (mu3 * (1.0 - eps) + arrive - mu3 * mu_i * (1.0 - eps) * (eps - eps12))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MwBoundTerms {
    pub phi_i: f64,
    pub psi_i: f64,
    /// `NaN` when the queue never changes state (no arrivals, no departures);
    /// it is then multiplied by `mu3 = 0` and does not enter the bound.
    pub p_ne_i: f64,
}

pub fn mw_bound_terms(user: User, mu: &ActionWeights, params: &ChannelParams) -> Result<MwBoundTerms> {
    let mu_i = mu.direct(user);
    let eps = params.eps(user);
    let s = mu_i * (1.0 - eps);
    if s <= 0.0 {
        return Err(Error::NeverServed(user.number()));
    }
    let arrive = mu_i * params.overhear(user);
    let p_ne = if arrive == 0.0 && mu.mu3() == 0.0 {
        f64::NAN
    } else {
        q2_nonempty_direct(mu_i, mu.mu3(), eps, params.eps12())
    };
    let coded = if mu.mu3() == 0.0 { 0.0 } else { mu.mu3() * p_ne * (1.0 - eps) };
    let rest = 1.0 - s - coded;
    Ok(MwBoundTerms { phi_i: rest / s, psi_i: 1.0 - coded + rest * rest / s, p_ne_i: p_ne })
}

/// Upper bound on the Max-Weight weighted-sum average age, parametrized by
/// a randomized reference policy `mu`:
/// `sqrt(1/2 sum alpha_i / (mu_i (1 - eps_i)) * sum alpha_i Psi_i) + 1/2 sum alpha_i Phi_i`.
pub fn mw_upper_bound(alphas: &AgeWeights, mu: &ActionWeights, params: &ChannelParams) -> Result<f64> {
    let mut inv = 0.0;
    let mut psi = 0.0;
    let mut phi = 0.0;
    for user in User::BOTH {
        let t = mw_bound_terms(user, mu, params)?;
        let a = alphas.alpha(user);
        inv += a / (mu.direct(user) * (1.0 - params.eps(user)));
        psi += a * t.psi_i;
        phi += a * t.phi_i;
    }
    Ok((0.5 * inv * psi).sqrt() + 0.5 * phi)
}

/// Exact expected change of `L(h) = 1/2 sum alpha_i h_i^2` over one slot
/// when `action` is taken in `state`.
pub fn one_slot_drift(state: &AoiState, action: Action, alphas: &AgeWeights, params: &ChannelParams) -> f64 {
    let mut theta = 0.0;
    for user in User::BOTH {
        let h = state.age(user) as f64;
        let w = state.overheard_age(user) as f64;
        let p = 1.0 - params.eps(user);
        let e_d = if action.serves(user) { p } else { 0.0 };
        let e_t = if action == Action::Coded && state.has_overheard(user) { p } else { 0.0 };
        theta += alphas.alpha(user) * (e_t * (w * w + 2.0 * w - h * h - 2.0 * h) - e_d * (h * h + 2.0 * h) + 2.0 * h + 1.0);
    }
    theta / 2.0
}
