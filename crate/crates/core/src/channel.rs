//! Memoryless two-user broadcast packet-erasure channel.
//!
//! Each slot produces a pair `(Z1, Z2)` of reception indicators, independent
//! across slots but possibly correlated within a slot. The law is fixed by
//! the marginal erasure probabilities `eps1 = Pr(Z1 = 0)`,
//! `eps2 = Pr(Z2 = 0)` and the joint erasure probability
//! `eps12 = Pr(Z1 = 0, Z2 = 0)`.
//!
//! The age dynamics only ever look at two things: whether the intended user
//! received a fresh packet, and, when it did not, whether the other user
//! overheard it. Both are well defined for any `0 <= eps12 <= min(eps1, eps2)`
//! even when no joint law with those three numbers exists (that happens when
//! `1 - eps1 - eps2 + eps12 < 0`). [`ChannelParams::new`] insists on a
//! realizable joint law; [`ChannelParams::overhearing_model`] accepts the
//! wider family and [`ChannelParams::law_for`] picks a valid per-action law
//! that preserves every probability the dynamics depend on.

use rand::Rng;

use crate::aoi::{Action, User};
use crate::error::{Error, Result};

/// Slack used when deciding whether the joint success probability is
/// nonnegative, so that extremal couplings written in decimal survive
/// rounding.
const REALIZABLE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    eps1: f64,
    eps2: f64,
    eps12: f64,
}

/// Reception indicators for one slot: `true` means the packet got through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ErasurePair {
    pub z1: bool,
    pub z2: bool,
}

impl ErasurePair {
    pub const fn new(z1: bool, z2: bool) -> Self {
        Self { z1, z2 }
    }

    pub fn received(&self, user: User) -> bool {
        match user {
            User::One => self.z1,
            User::Two => self.z2,
        }
    }

    /// Cell index in `[(0,0), (0,1), (1,0), (1,1)]` order.
    pub fn cell(&self) -> usize {
        (usize::from(self.z1) << 1) | usize::from(self.z2)
    }

    pub const CELLS: [ErasurePair; 4] = [
        ErasurePair::new(false, false),
        ErasurePair::new(false, true),
        ErasurePair::new(true, false),
        ErasurePair::new(true, true),
    ];
}

/// A four-cell probability table over `(Z1, Z2)`, in
/// `[(0,0), (0,1), (1,0), (1,1)]` order. Always nonnegative and sums to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointLaw {
    pub probs: [f64; 4],
}

impl JointLaw {
    /// Maps a uniform draw in `[0, 1)` onto a cell by partitioning the unit
    /// interval in table order.
    pub fn pick(&self, u: f64) -> ErasurePair {
        let [p00, p01, p10, _] = self.probs;
        let t0 = p00;
        let t1 = t0 + p01;
        let t2 = t1 + p10;
        if u < t0 {
            ErasurePair::CELLS[0]
        } else if u < t1 {
            ErasurePair::CELLS[1]
        } else if u < t2 {
            ErasurePair::CELLS[2]
        } else {
            ErasurePair::CELLS[3]
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ErasurePair {
        self.pick(rng.gen::<f64>())
    }
}

fn check_probability(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidChannel(format!("{name} = {v} is not in [0, 1]")));
    }
    Ok(())
}

impl ChannelParams {
    /// Validates a realizable channel: marginals in `[0, 1)`,
    /// `0 <= eps12 <= min(eps1, eps2)` and `eps12 >= eps1 + eps2 - 1`.
    pub fn new(eps1: f64, eps2: f64, eps12: f64) -> Result<Self> {
        let params = Self::overhearing_model(eps1, eps2, eps12)?;
        if !params.is_realizable() {
            return Err(Error::InvalidChannel(format!(
                "joint success probability 1 - eps1 - eps2 + eps12 = {} is negative",
                params.both_received()
            )));
        }
        Ok(params)
    }

    /// Validates everything [`ChannelParams::new`] does except the lower
    /// Frechet bound `eps12 >= eps1 + eps2 - 1`.
    pub fn overhearing_model(eps1: f64, eps2: f64, eps12: f64) -> Result<Self> {
        check_probability("eps1", eps1)?;
        check_probability("eps2", eps2)?;
        check_probability("eps12", eps12)?;
        if eps1 >= 1.0 || eps2 >= 1.0 {
            return Err(Error::InvalidChannel(
                "a marginal erasure probability of 1 means the user is never reached".into(),
            ));
        }
        if eps12 > eps1.min(eps2) {
            return Err(Error::InvalidChannel(format!(
                "eps12 = {eps12} exceeds min(eps1, eps2) = {}",
                eps1.min(eps2)
            )));
        }
        Ok(Self { eps1, eps2, eps12 })
    }

    /// Symmetric channel `eps1 = eps2 = eps` under the overhearing model.
    pub fn symmetric(eps: f64, eps12: f64) -> Result<Self> {
        Self::overhearing_model(eps, eps, eps12)
    }

    pub fn eps1(&self) -> f64 {
        self.eps1
    }

    pub fn eps2(&self) -> f64 {
        self.eps2
    }

    pub fn eps12(&self) -> f64 {
        self.eps12
    }

    pub fn eps(&self, user: User) -> f64 {
        match user {
            User::One => self.eps1,
            User::Two => self.eps2,
        }
    }

    /// The same channel with the users relabelled.
    pub fn swapped(&self) -> Self {
        Self { eps1: self.eps2, eps2: self.eps1, eps12: self.eps12 }
    }

    /// `Pr(Z1 = 1, Z2 = 1) = 1 - eps1 - eps2 + eps12`; negative when the
    /// parameters do not describe a joint law.
    pub fn both_received(&self) -> f64 {
        1.0 - self.eps1 - self.eps2 + self.eps12
    }

    pub fn is_realizable(&self) -> bool {
        self.both_received() >= -REALIZABLE_SLACK
    }

    /// Probability that a packet meant for `user` is erased there but
    /// received by the other user.
    pub fn overhear(&self, user: User) -> f64 {
        self.eps(user) - self.eps12
    }

    /// The exact four-cell table. For non-realizable parameters the joint
    /// erasure mass is raised to the smallest feasible value
    /// `eps1 + eps2 - 1`, which keeps both marginals exact.
    pub fn joint_table(&self) -> JointLaw {
        let p00 = self.eps12.max(self.eps1 + self.eps2 - 1.0);
        let p01 = self.eps1 - p00;
        let p10 = self.eps2 - p00;
        let p11 = (1.0 - self.eps1 - self.eps2 + p00).max(0.0);
        JointLaw { probs: [p00, p01, p10, p11] }
    }

    /// The erasure law used in a slot where `action` is taken.
    ///
    /// For realizable parameters this is [`ChannelParams::joint_table`]
    /// regardless of the action. Otherwise, for a direct transmission to
    /// user `i` the table keeps `Pr(both erased) = eps12` and
    /// `Pr(only i erased) = eps_i - eps12` exactly (these drive the
    /// overheard queue) and puts the remaining `1 - eps_i` on "`i` received,
    /// other erased", whose second coordinate has no effect on the ages.
    /// For the coded action each user reacts only to its own indicator, so
    /// the clipped joint table is used.
    pub fn law_for(&self, action: Action) -> JointLaw {
        if self.is_realizable() {
            return self.joint_table();
        }
        match action {
            Action::Fresh1 => JointLaw {
                probs: [self.eps12, self.eps1 - self.eps12, 1.0 - self.eps1, 0.0],
            },
            Action::Fresh2 => JointLaw {
                probs: [self.eps12, 1.0 - self.eps2, self.eps2 - self.eps12, 0.0],
            },
            Action::Coded => self.joint_table(),
        }
    }

    /// Draws one slot of the joint law using a single uniform variate.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ErasurePair {
        self.joint_table().sample(rng)
    }

    /// Draws one slot of [`ChannelParams::law_for`] using a single uniform
    /// variate.
    pub fn sample_for<R: Rng + ?Sized>(&self, action: Action, rng: &mut R) -> ErasurePair {
        self.law_for(action).sample(rng)
    }
}
