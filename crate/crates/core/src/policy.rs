//! Scheduling policies: stationary randomized and Max-Weight, each with an
//! uncoded variant that never transmits the XOR packet.

use rand::Rng;

use crate::aoi::{Action, AgeWeights, AoiState, User};
use crate::channel::ChannelParams;
use crate::error::{Error, Result};

/// Probabilities `(mu1, mu2, mu3)` of the three actions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionWeights {
    mu: [f64; 3],
}

impl ActionWeights {
    pub const SUM_TOLERANCE: f64 = 1e-12;

    pub fn new(mu1: f64, mu2: f64, mu3: f64) -> Result<Self> {
        let mu = [mu1, mu2, mu3];
        if mu.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::InvalidActionWeights(format!(
                "probabilities must be nonnegative, got ({mu1}, {mu2}, {mu3})"
            )));
        }
        let sum: f64 = mu.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(Error::InvalidActionWeights(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(Self { mu })
    }

    /// Uncoded policy `(mu1, 1 - mu1, 0)`.
    pub fn uncoded(mu1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mu1) {
            return Err(Error::InvalidActionWeights(format!("mu1 = {mu1} is not in [0, 1]")));
        }
        Self::new(mu1, 1.0 - mu1, 0.0)
    }

    /// `(mu, mu, 1 - 2 mu)`.
    pub fn symmetric(mu: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&mu) {
            return Err(Error::InvalidActionWeights(format!("mu = {mu} is not in [0, 1/2]")));
        }
        Self::new(mu, mu, (1.0 - 2.0 * mu).max(0.0))
    }

    pub fn mu1(&self) -> f64 {
        self.mu[0]
    }

    pub fn mu2(&self) -> f64 {
        self.mu[1]
    }

    pub fn mu3(&self) -> f64 {
        self.mu[2]
    }

    pub fn get(&self, action: Action) -> f64 {
        self.mu[usize::from(action.number() - 1)]
    }

    /// Probability of a direct transmission to `user`.
    pub fn direct(&self, user: User) -> f64 {
        self.get(Action::fresh_for(user))
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.mu
    }

    pub fn swapped(&self) -> Self {
        Self { mu: [self.mu[1], self.mu[0], self.mu[2]] }
    }

    /// Drops the coded action and rescales `(mu1, mu2)` to sum to one.
    pub fn without_coding(&self) -> Result<Self> {
        let s = self.mu[0] + self.mu[1];
        if s <= 0.0 {
            return Err(Error::InvalidActionWeights(
                "mu1 = mu2 = 0 leaves nothing to transmit without coding".into(),
            ));
        }
        Ok(Self { mu: [self.mu[0] / s, self.mu[1] / s, 0.0] })
    }

    /// Maps one uniform draw in `[0, 1)` to an action. Actions with zero
    /// probability are never returned, even when the probabilities sum to
    /// slightly less than one.
    pub fn pick(&self, u: f64) -> Action {
        let c1 = self.mu[0];
        let c2 = c1 + self.mu[1];
        if u < c1 {
            Action::Fresh1
        } else if u < c2 {
            Action::Fresh2
        } else if self.mu[2] > 0.0 {
            Action::Coded
        } else if self.mu[1] > 0.0 {
            Action::Fresh2
        } else {
            Action::Fresh1
        }
    }

    pub fn randomized_choose<R: Rng + ?Sized>(&self, rng: &mut R) -> Action {
        self.pick(rng.gen::<f64>())
    }
}

/// The three Max-Weight action weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MwWeightTriple {
    pub w_action1: f64,
    pub w_action2: f64,
    pub w_action3: f64,
}

impl MwWeightTriple {
    /// Weights for arbitrary nonnegative `(alpha1, alpha2)`; they need not
    /// sum to one.
    pub fn compute(state: &AoiState, alpha: [f64; 2], params: &ChannelParams) -> Self {
        let mut direct = [0.0; 2];
        let mut coded = 0.0;
        for user in User::BOTH {
            let c = alpha[user.index()] * (1.0 - params.eps(user));
            let h = state.age(user) as f64;
            let w = state.overheard_age(user) as f64;
            direct[user.index()] = c / 2.0 * h * (h + 2.0);
            if state.has_overheard(user) {
                coded += c * (h * h + 2.0 * h - w * w - 2.0 * w);
            }
        }
        Self { w_action1: direct[0], w_action2: direct[1], w_action3: coded / 2.0 }
    }

    pub fn get(&self, action: Action) -> f64 {
        match action {
            Action::Fresh1 => self.w_action1,
            Action::Fresh2 => self.w_action2,
            Action::Coded => self.w_action3,
        }
    }

    /// Highest weight, lowest action number on ties.
    pub fn argmax(&self, allow_coded: bool) -> Action {
        let mut best = Action::Fresh1;
        for a in [Action::Fresh2, Action::Coded] {
            if a == Action::Coded && !allow_coded {
                continue;
            }
            if self.get(a) > self.get(best) {
                best = a;
            }
        }
        best
    }
}

pub fn mw_weights(state: &AoiState, alphas: &AgeWeights, params: &ChannelParams) -> MwWeightTriple {
    MwWeightTriple::compute(state, [alphas.alpha1(), alphas.alpha2()], params)
}

/// Max-Weight decision; ties go to the lowest action number.
pub fn mw_choose(state: &AoiState, alphas: &AgeWeights, params: &ChannelParams) -> Action {
    mw_weights(state, alphas, params).argmax(true)
}

/// Max-Weight restricted to the two direct actions.
pub fn mw_choose_uncoded(state: &AoiState, alphas: &AgeWeights, params: &ChannelParams) -> Action {
    mw_weights(state, alphas, params).argmax(false)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Policy {
    Randomized(ActionWeights),
    MaxWeight { coded: bool },
}

impl Policy {
    /// Next action. Randomized policies consume one uniform from `rng`;
    /// Max-Weight consumes nothing.
    pub fn choose<R: Rng + ?Sized>(
        &self,
        state: &AoiState,
        alphas: &AgeWeights,
        params: &ChannelParams,
        rng: &mut R,
    ) -> Action {
        match self {
            Policy::Randomized(mu) => mu.randomized_choose(rng),
            Policy::MaxWeight { coded: true } => mw_choose(state, alphas, params),
            Policy::MaxWeight { coded: false } => mw_choose_uncoded(state, alphas, params),
        }
    }

    /// The same policy without the coded action. Randomized weights are
    /// rescaled proportionally.
    pub fn uncoded(&self) -> Result<Policy> {
        match self {
            Policy::Randomized(mu) => Ok(Policy::Randomized(mu.without_coding()?)),
            Policy::MaxWeight { .. } => Ok(Policy::MaxWeight { coded: false }),
        }
    }

    pub fn is_coded(&self) -> bool {
        match self {
            Policy::Randomized(mu) => mu.mu3() > 0.0,
            Policy::MaxWeight { coded } => *coded,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Policy::Randomized(mu) if mu.mu3() > 0.0 => "coded randomized",
            Policy::Randomized(_) => "uncoded randomized",
            Policy::MaxWeight { coded: true } => "coded max-weight",
            Policy::MaxWeight { coded: false } => "uncoded max-weight",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn half_channel() -> ChannelParams {
        ChannelParams::new(0.5, 0.5, 0.2).unwrap()
    }

    #[test]
    fn simplex_validation() {
        assert!(ActionWeights::new(0.2, 0.3, 0.5).is_ok());
        assert!(ActionWeights::new(0.2, 0.3, 0.4).is_err());
        assert!(ActionWeights::new(-0.1, 0.6, 0.5).is_err());
        assert!(ActionWeights::new(f64::NAN, 0.5, 0.5).is_err());
    }

    #[test]
    fn degenerate_simplex_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = ActionWeights::new(1.0, 0.0, 0.0).unwrap();
        let c = ActionWeights::new(0.0, 0.0, 1.0).unwrap();
        for _ in 0..10_000 {
            assert_eq!(a.randomized_choose(&mut rng), Action::Fresh1);
            assert_eq!(c.randomized_choose(&mut rng), Action::Coded);
        }
        // Rounding shortfall never lands on a zero-probability action.
        let u = ActionWeights::new(0.7, 0.3 - 1e-13, 0.0).unwrap();
        assert_eq!(u.pick(1.0 - 1e-14), Action::Fresh2);
    }

    #[test]
    fn randomized_frequencies() {
        let mu = ActionWeights::new(0.3, 0.3, 0.4).unwrap();
        let n = 1_000_000;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut counts = [0usize; 3];
        for _ in 0..n {
            counts[usize::from(mu.randomized_choose(&mut rng).number() - 1)] += 1;
        }
        for (k, p) in mu.as_array().iter().enumerate() {
            let f = counts[k] as f64 / n as f64;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((f - p).abs() < 4.0 * se, "action {}: {f} vs {p}", k + 1);
        }
    }

    #[test]
    fn without_coding_is_proportional() {
        let mu = ActionWeights::new(0.2, 0.3, 0.5).unwrap().without_coding().unwrap();
        assert!((mu.mu1() - 0.4).abs() < 1e-15);
        assert!((mu.mu2() - 0.6).abs() < 1e-15);
        assert_eq!(mu.mu3(), 0.0);
        assert!(ActionWeights::new(0.0, 0.0, 1.0).unwrap().without_coding().is_err());
    }

    #[test]
    fn weight_table_example() {
        let s = AoiState::new(3, 4, 1, 2).unwrap();
        let w = mw_weights(&s, &AgeWeights::equal(), &half_channel());
        assert!((w.w_action1 - 1.875).abs() < 1e-14);
        assert!((w.w_action2 - 3.0).abs() < 1e-14);
        assert!((w.w_action3 - 3.5).abs() < 1e-14);
        assert_eq!(mw_choose(&s, &AgeWeights::equal(), &half_channel()), Action::Coded);
        assert_eq!(mw_choose_uncoded(&s, &AgeWeights::equal(), &half_channel()), Action::Fresh2);
    }

    #[test]
    fn empty_queues_give_zero_coded_weight() {
        let s = AoiState::new(7, 9, 0, 0).unwrap();
        assert_eq!(mw_weights(&s, &AgeWeights::equal(), &half_channel()).w_action3, 0.0);
    }

    #[test]
    fn zero_alpha_zeroes_weight() {
        let w = AgeWeights::new(1.0, 0.0).unwrap();
        for h2 in 1..10 {
            let s = AoiState::new(4, h2, 2, h2 - 1).unwrap();
            assert_eq!(mw_weights(&s, &w, &half_channel()).w_action2, 0.0);
        }
    }

    #[test]
    fn stale_user_wins() {
        let s = AoiState::new(10, 1, 0, 0).unwrap();
        assert_eq!(mw_choose(&s, &AgeWeights::equal(), &half_channel()), Action::Fresh1);
    }

    #[test]
    fn ties_go_to_lowest_action() {
        for h in 1..20 {
            let s = AoiState::new(h, h, 0, 0).unwrap();
            assert_eq!(mw_choose(&s, &AgeWeights::equal(), &half_channel()), Action::Fresh1);
        }
    }

    #[test]
    fn uncoded_variants() {
        let p = Policy::Randomized(ActionWeights::new(0.2, 0.3, 0.5).unwrap()).uncoded().unwrap();
        assert_eq!(p, Policy::Randomized(ActionWeights::new(0.4, 0.6, 0.0).unwrap()));
        assert_eq!(Policy::MaxWeight { coded: true }.uncoded().unwrap(), Policy::MaxWeight { coded: false });
    }

    fn arb_state() -> impl Strategy<Value = AoiState> {
        (1u64..40, 1u64..40, 0u64..40, 0u64..40)
            .prop_map(|(h1, h2, w1, w2)| AoiState::new(h1, h2, w1 % h1, w2 % h2).unwrap())
    }

    proptest! {
        #[test]
        fn weights_nonnegative(s in arb_state(), a in 0.0..=1.0f64, e1 in 0.0..0.99f64, e2 in 0.0..0.99f64, f in 0.0..=1.0f64) {
            let params = ChannelParams::overhearing_model(e1, e2, f * e1.min(e2)).unwrap();
            let w = mw_weights(&s, &AgeWeights::from_alpha1(a).unwrap(), &params);
            for act in Action::ALL {
                prop_assert!(w.get(act) >= 0.0);
            }
        }

        #[test]
        fn argmax_invariant_under_alpha_scaling(s in arb_state(), a in 0.0..=1.0f64, scale in 0.01..100.0f64, e in 0.0..0.9f64) {
            let params = ChannelParams::overhearing_model(e, e, e * e / 2.0).unwrap();
            let base = MwWeightTriple::compute(&s, [a, 1.0 - a], &params);
            let scaled = MwWeightTriple::compute(&s, [scale * a, scale * (1.0 - a)], &params);
            // Exact ties may be broken differently after rounding; only compare clear winners.
            let best = base.argmax(true);
            let runner_up = Action::ALL
                .iter()
                .filter(|&&x| x != best)
                .map(|&x| base.get(x))
                .fold(f64::NEG_INFINITY, f64::max);
            prop_assume!(base.get(best) - runner_up > 1e-9 * base.get(best).max(1.0));
            prop_assert_eq!(scaled.argmax(true), best);
        }
    }
}
