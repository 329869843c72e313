//! Deterministic age dynamics.
//!
//! The encoder keeps, per user `i`, a fresh-packet queue (always holding the
//! packet generated this slot, so it carries no state) and an
//! overheard-packet queue of buffer size one: a packet meant for `i` that
//! `i` missed but the other user received. The state records the age `h_i`
//! at each receiver and the age `w_i` of the overheard packet, with
//! `w_i = 0` meaning the queue is empty.

use std::fmt;

use crate::channel::ErasurePair;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum User {
    One,
    Two,
}

impl User {
    pub const BOTH: [User; 2] = [User::One, User::Two];

    pub fn other(self) -> User {
        match self {
            User::One => User::Two,
            User::Two => User::One,
        }
    }

    pub fn index(self) -> usize {
        match self {
            User::One => 0,
            User::Two => 1,
        }
    }

    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }
}

/// What the encoder transmits in a slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    /// Fresh packet for user 1.
    Fresh1,
    /// Fresh packet for user 2.
    Fresh2,
    /// XOR of the two overheard queues.
    Coded,
}

impl Action {
    pub const ALL: [Action; 3] = [Action::Fresh1, Action::Fresh2, Action::Coded];

    /// 1, 2 or 3.
    pub fn number(self) -> u8 {
        match self {
            Action::Fresh1 => 1,
            Action::Fresh2 => 2,
            Action::Coded => 3,
        }
    }

    pub fn from_number(n: u8) -> Option<Action> {
        match n {
            1 => Some(Action::Fresh1),
            2 => Some(Action::Fresh2),
            3 => Some(Action::Coded),
            _ => None,
        }
    }

    pub fn fresh_for(user: User) -> Action {
        match user {
            User::One => Action::Fresh1,
            User::Two => Action::Fresh2,
        }
    }

    /// Whether this is a direct transmission to `user`.
    pub fn serves(self, user: User) -> bool {
        self == Action::fresh_for(user)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// `(h1, h2, w1, w2)`, with `h_i >= 1` and `0 <= w_i <= h_i - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AoiState {
    pub h1: u64,
    pub h2: u64,
    pub w1: u64,
    pub w2: u64,
}

impl Default for AoiState {
    fn default() -> Self {
        Self::INITIAL
    }
}

impl AoiState {
    pub const INITIAL: AoiState = AoiState { h1: 1, h2: 1, w1: 0, w2: 0 };

    pub fn new(h1: u64, h2: u64, w1: u64, w2: u64) -> Result<Self> {
        let s = Self { h1, h2, w1, w2 };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for user in User::BOTH {
            let (h, w) = (self.age(user), self.overheard_age(user));
            if h == 0 {
                return Err(Error::InvalidState(format!("h{} must be at least 1", user.number())));
            }
            if w >= h {
                return Err(Error::InvalidState(format!(
                    "w{n} = {w} must be at most h{n} - 1 = {}",
                    h - 1,
                    n = user.number()
                )));
            }
        }
        Ok(())
    }

    pub fn age(&self, user: User) -> u64 {
        match user {
            User::One => self.h1,
            User::Two => self.h2,
        }
    }

    pub fn overheard_age(&self, user: User) -> u64 {
        match user {
            User::One => self.w1,
            User::Two => self.w2,
        }
    }

    pub fn has_overheard(&self, user: User) -> bool {
        self.overheard_age(user) > 0
    }

    /// Next-slot `(h, w)` of one user.
    fn advance_user(&self, user: User, action: Action, z: ErasurePair) -> (u64, u64) {
        let h = self.age(user);
        let w = self.overheard_age(user);
        let own = z.received(user);
        let other = z.received(user.other());
        let direct = action.serves(user);
        let coded = action == Action::Coded;

        let next_w = if (direct || coded) && own {
            0
        } else if direct && !own && other {
            1
        } else if w > 0 {
            w + 1
        } else {
            0
        };

        // An empty overheard queue has nothing to contribute to the XOR, so a
        // coded slot only resets the age when w > 0.
        let next_h = if direct && own {
            1
        } else if coded && own && w > 0 {
            w + 1
        } else {
            h + 1
        };
        (next_h, next_w)
    }

    /// Applies one slot of the dynamics.
    pub fn step(&self, action: Action, erasures: ErasurePair) -> AoiState {
        let (h1, w1) = self.advance_user(User::One, action, erasures);
        let (h2, w2) = self.advance_user(User::Two, action, erasures);
        AoiState { h1, h2, w1, w2 }
    }

    /// Whether `user` received a packet in the slot that led from `self` to
    /// `next`. Every delivery lowers or keeps the age; no delivery raises it
    /// by one.
    pub fn delivered(&self, next: &AoiState, user: User) -> bool {
        next.age(user) <= self.age(user)
    }
}

impl fmt::Display for AoiState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.h1, self.h2, self.w1, self.w2)
    }
}

/// Objective weights `(alpha1, alpha2)` with `alpha_i >= 0`, summing to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgeWeights {
    alpha1: f64,
    alpha2: f64,
}

impl AgeWeights {
    const SUM_TOLERANCE: f64 = 1e-12;

    pub fn new(alpha1: f64, alpha2: f64) -> Result<Self> {
        if !alpha1.is_finite() || !alpha2.is_finite() || alpha1 < 0.0 || alpha2 < 0.0 {
            return Err(Error::InvalidAgeWeights(format!(
                "weights must be nonnegative, got ({alpha1}, {alpha2})"
            )));
        }
        if (alpha1 + alpha2 - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(Error::InvalidAgeWeights(format!(
                "weights must sum to 1, got {}",
                alpha1 + alpha2
            )));
        }
        Ok(Self { alpha1, alpha2 })
    }

    /// `(alpha1, 1 - alpha1)`.
    pub fn from_alpha1(alpha1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha1) {
            return Err(Error::InvalidAgeWeights(format!("alpha1 = {alpha1} is not in [0, 1]")));
        }
        Self::new(alpha1, 1.0 - alpha1)
    }

    pub fn equal() -> Self {
        Self { alpha1: 0.5, alpha2: 0.5 }
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }

    pub fn alpha(&self, user: User) -> f64 {
        match user {
            User::One => self.alpha1,
            User::Two => self.alpha2,
        }
    }

    pub fn swapped(&self) -> Self {
        Self { alpha1: self.alpha2, alpha2: self.alpha1 }
    }
}

/// Finite-horizon objective `J_T = (1/2T) sum_k sum_i alpha_i h_i(k)`.
///
/// The ages are summed exactly in 128-bit integers; the only rounding is the
/// final weighting and division.
pub fn ewsaoi_accumulate(trajectory: &[(u64, u64)], weights: &AgeWeights) -> Result<f64> {
    if trajectory.is_empty() {
        return Err(Error::InvalidState("empty age trajectory".into()));
    }
    let mut sums = [0u128; 2];
    for (k, &(h1, h2)) in trajectory.iter().enumerate() {
        if h1 == 0 || h2 == 0 {
            return Err(Error::InvalidState(format!("zero age at slot {}", k + 1)));
        }
        sums[0] += u128::from(h1);
        sums[1] += u128::from(h2);
    }
    Ok(weighted_objective(sums, trajectory.len() as u64, weights))
}

/// `(alpha1 S1 + alpha2 S2) / 2T` from exact per-user age sums.
pub fn weighted_objective(age_sums: [u128; 2], horizon: u64, weights: &AgeWeights) -> f64 {
    let t = horizon as f64;
    (weights.alpha1 * (age_sums[0] as f64 / t) + weights.alpha2 * (age_sums[1] as f64 / t)) / 2.0
}
