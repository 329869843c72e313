//! Slot-by-slot simulation of one policy over a finite horizon.
//!
//! Each slot draws at most two uniforms from the run's ChaCha8 stream: one
//! for the action when the policy is randomized, then one for the channel.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::aoi::{weighted_objective, Action, AgeWeights, AoiState, User};
use crate::channel::{ChannelParams, JointLaw};
use crate::error::{Error, Result};
use crate::policy::Policy;
use crate::renewal::{Delivery, RenewalAccumulator};

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub policy: Policy,
    pub params: ChannelParams,
    pub alphas: AgeWeights,
    /// `T`, in slots.
    pub horizon: u64,
    /// Replications `R`.
    pub reps: u32,
    pub base_seed: u64,
    pub initial: AoiState,
    /// Keep every delivery (slot and age) in the result.
    pub record_deliveries: bool,
}

impl SimConfig {
    pub fn new(policy: Policy, params: ChannelParams, alphas: AgeWeights) -> Self {
        Self {
            policy,
            params,
            alphas,
            horizon: 1_000_000,
            reps: 20,
            base_seed: 0,
            initial: AoiState::INITIAL,
            record_deliveries: false,
        }
    }

    pub fn with_horizon(mut self, horizon: u64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_reps(mut self, reps: u32) -> Self {
        self.reps = reps;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.base_seed = seed;
        self
    }

    pub fn with_initial(mut self, initial: AoiState) -> Self {
        self.initial = initial;
        self
    }

    pub fn recording_deliveries(mut self) -> Self {
        self.record_deliveries = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidConfig("horizon must be at least 1".into()));
        }
        if self.reps == 0 {
            return Err(Error::InvalidConfig("need at least one replication".into()));
        }
        self.initial.validate()
    }
}

/// Per-user statistics of one run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct UserStats {
    /// Exact sum of `h(k)` over `k = 1..=T`.
    pub age_sum: u128,
    /// `N(T)`.
    pub deliveries: u64,
    pub interval_sum: u128,
    pub interval_sq_sum: u128,
    pub delivery_age_sum: u128,
    /// `L = T - (slot of last delivery)`.
    pub residual: u64,
    /// The age sum rebuilt from the renewal decomposition.
    pub renewal_area: u128,
    /// Slots that started with an empty overheard queue.
    pub q2_empty_slots: u64,
    /// Every delivery, on the renewal clock where the initial state is slot 0.
    pub delivery_log: Option<Vec<Delivery>>,
}

impl UserStats {
    pub fn throughput(&self, horizon: u64) -> f64 {
        self.deliveries as f64 / horizon as f64
    }

    pub fn average_age(&self, horizon: u64) -> f64 {
        self.age_sum as f64 / horizon as f64
    }

    /// `None` without deliveries.
    pub fn mean_interval(&self) -> Option<f64> {
        (self.deliveries > 0).then(|| self.interval_sum as f64 / self.deliveries as f64)
    }

    pub fn interval_second_moment(&self) -> Option<f64> {
        (self.deliveries > 0).then(|| self.interval_sq_sum as f64 / self.deliveries as f64)
    }

    pub fn mean_delivery_age(&self) -> Option<f64> {
        (self.deliveries > 0).then(|| self.delivery_age_sum as f64 / self.deliveries as f64)
    }

    pub fn q2_empty_fraction(&self, horizon: u64) -> f64 {
        self.q2_empty_slots as f64 / horizon as f64
    }

    /// Inter-delivery times, when deliveries were recorded.
    pub fn intervals(&self) -> Option<Vec<u64>> {
        self.delivery_log.as_ref().map(|log| {
            let mut prev = 0;
            log.iter()
                .map(|d| {
                    let i = d.slot - prev;
                    prev = d.slot;
                    i
                })
                .collect()
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub horizon: u64,
    pub seed: u64,
    /// `(1/2T) sum_k sum_i alpha_i h_i(k)`.
    pub ewsaoi: f64,
    pub users: [UserStats; 2],
    /// How often each action was taken.
    pub action_counts: [u64; 3],
    pub final_state: AoiState,
}

impl SimResult {
    pub fn user(&self, user: User) -> &UserStats {
        &self.users[user.index()]
    }

    pub fn throughput(&self) -> (f64, f64) {
        (self.users[0].throughput(self.horizon), self.users[1].throughput(self.horizon))
    }

    /// The objective recomputed from the renewal areas.
    pub fn renewal_ewsaoi(&self, alphas: &AgeWeights) -> f64 {
        weighted_objective([self.users[0].renewal_area, self.users[1].renewal_area], self.horizon, alphas)
    }
}

/// Runs `config.horizon` slots from `config.initial` with a ChaCha8 stream
/// seeded from `seed`. Deterministic in `(config, seed)`.
pub fn run_simulation(config: &SimConfig, seed: u64) -> Result<SimResult> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let laws: [JointLaw; 3] = Action::ALL.map(|a| config.params.law_for(a));
    let horizon = config.horizon;

    let mut state = config.initial;
    let mut acc = [RenewalAccumulator::new(state.h1), RenewalAccumulator::new(state.h2)];
    let mut logs: [Vec<Delivery>; 2] = [Vec::new(), Vec::new()];
    let mut age_sum = [0u128; 2];
    let mut q2_empty = [0u64; 2];
    let mut action_counts = [0u64; 3];

    for k in 1..=horizon {
        age_sum[0] += u128::from(state.h1);
        age_sum[1] += u128::from(state.h2);
        q2_empty[0] += u64::from(state.w1 == 0);
        q2_empty[1] += u64::from(state.w2 == 0);

        let action = config.policy.choose(&state, &config.alphas, &config.params, &mut rng);
        action_counts[usize::from(action.number() - 1)] += 1;
        let z = laws[usize::from(action.number() - 1)].sample(&mut rng);
        let next = state.step(action, z);

        for user in User::BOTH {
            if state.delivered(&next, user) {
                let d = Delivery { slot: k, age: next.age(user) };
                acc[user.index()].push(d)?;
                if config.record_deliveries {
                    logs[user.index()].push(d);
                }
            }
        }
        state = next;
    }

    let mut users: [UserStats; 2] = Default::default();
    for user in User::BOTH {
        let i = user.index();
        let a = &acc[i];
        users[i] = UserStats {
            age_sum: age_sum[i],
            deliveries: a.count,
            interval_sum: a.interval_sum,
            interval_sq_sum: a.interval_sq_sum,
            delivery_age_sum: a.delivery_age_sum,
            residual: a.residual(horizon)?,
            renewal_area: a.total_area(horizon)?,
            q2_empty_slots: q2_empty[i],
            delivery_log: config.record_deliveries.then(|| std::mem::take(&mut logs[i])),
        };
    }
    Ok(SimResult {
        horizon,
        seed,
        ewsaoi: weighted_objective(age_sum, horizon, &config.alphas),
        users,
        action_counts,
        final_state: state,
    })
}
