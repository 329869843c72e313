//! Renewal bookkeeping of a single user's age sawtooth.
//!
//! Slots are counted from 0, where the age equals the initial age `D(0)`.
//! A delivery at slot `s` sets the age at `s` to the age-at-delivery `D`;
//! between deliveries the age grows by one per slot. The area under the
//! sawtooth over `[0, T)` splits into one term per inter-delivery interval
//! plus a residual term after the last delivery:
//!
//! ```text
//! Delta(m) = I(m) (I(m) + 2 D(m-1) - 1) / 2
//! residual = L (L + 2 D(N) - 1) / 2
//! ```

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Delivery {
    /// Slot at which the age drops, in `1..=T`.
    pub slot: u64,
    /// Age right after the delivery.
    pub age: u64,
}

/// Sum of the ages `D, D+1, ..., D+I-1` over one interval of length `I`
/// that starts at age `D`.
pub fn interval_age_sum(interval: u64, start_age: u64) -> u128 {
    let i = u128::from(interval);
    let d = u128::from(start_age);
    // I(I + 2D - 1) is always even.
    i * (i + 2 * d - 1) / 2
}

/// Same form as [`interval_age_sum`]; zero when `L = 0`.
pub fn residual_age_sum(residual: u64, last_age: u64) -> u128 {
    if residual == 0 {
        0
    } else {
        interval_age_sum(residual, last_age)
    }
}

/// Streaming version of [`renewal_decompose`] that keeps only sums.
#[derive(Debug, Clone, PartialEq)]
pub struct RenewalAccumulator {
    initial_age: u64,
    last_slot: u64,
    last_age: u64,
    pub count: u64,
    pub interval_sum: u128,
    pub interval_sq_sum: u128,
    pub delivery_age_sum: u128,
    pub area: u128,
}

impl RenewalAccumulator {
    pub fn new(initial_age: u64) -> Self {
        Self {
            initial_age,
            last_slot: 0,
            last_age: initial_age,
            count: 0,
            interval_sum: 0,
            interval_sq_sum: 0,
            delivery_age_sum: 0,
            area: 0,
        }
    }

    pub fn initial_age(&self) -> u64 {
        self.initial_age
    }

    pub fn last_slot(&self) -> u64 {
        self.last_slot
    }

    pub fn last_age(&self) -> u64 {
        self.last_age
    }

    /// Records a delivery and returns the interval it closes.
    pub fn push(&mut self, d: Delivery) -> Result<u64> {
        if d.slot <= self.last_slot {
            return Err(Error::InvalidDeliveryLog(format!(
                "delivery slot {} is not after {}",
                d.slot, self.last_slot
            )));
        }
        let interval = d.slot - self.last_slot;
        if d.age == 0 || d.age > self.last_age + interval {
            return Err(Error::InvalidDeliveryLog(format!(
                "age {} at slot {} is not reachable from age {} at slot {}",
                d.age, d.slot, self.last_age, self.last_slot
            )));
        }
        self.area += interval_age_sum(interval, self.last_age);
        self.count += 1;
        self.interval_sum += u128::from(interval);
        self.interval_sq_sum += u128::from(interval) * u128::from(interval);
        self.delivery_age_sum += u128::from(d.age);
        self.last_slot = d.slot;
        self.last_age = d.age;
        Ok(interval)
    }

    /// Residual length `L = T - s(N)`.
    pub fn residual(&self, horizon: u64) -> Result<u64> {
        horizon.checked_sub(self.last_slot).ok_or_else(|| {
            Error::InvalidDeliveryLog(format!(
                "delivery at slot {} is past the horizon {horizon}",
                self.last_slot
            ))
        })
    }

    /// Exact sum of the ages over slots `0..T`.
    pub fn total_area(&self, horizon: u64) -> Result<u128> {
        Ok(self.area + residual_age_sum(self.residual(horizon)?, self.last_age))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenewalDecomposition {
    pub horizon: u64,
    /// `N(T)`.
    pub count: u64,
    /// `I(1), ..., I(N)`.
    pub intervals: Vec<u64>,
    /// `D(1), ..., D(N)`.
    pub delivery_ages: Vec<u64>,
    /// `Delta(1), ..., Delta(N)`.
    pub interval_sums: Vec<u128>,
    /// `L`.
    pub residual: u64,
    pub residual_sum: u128,
}

impl RenewalDecomposition {
    /// `sum Delta(m) + residual`, the exact age area over `[0, T)`.
    pub fn total_area(&self) -> u128 {
        self.interval_sums.iter().sum::<u128>() + self.residual_sum
    }
}

/// Splits one user's delivery log over horizon `T` into renewal intervals.
///
/// Deliveries must have strictly increasing slots in `1..=T` and ages that
/// the sawtooth can actually reach.
pub fn renewal_decompose(
    horizon: u64,
    initial_age: u64,
    deliveries: &[Delivery],
) -> Result<RenewalDecomposition> {
    if initial_age == 0 {
        return Err(Error::InvalidDeliveryLog("initial age must be at least 1".into()));
    }
    let mut acc = RenewalAccumulator::new(initial_age);
    let mut intervals = Vec::with_capacity(deliveries.len());
    let mut interval_sums = Vec::with_capacity(deliveries.len());
    for d in deliveries {
        if d.slot > horizon {
            return Err(Error::InvalidDeliveryLog(format!(
                "delivery slot {} is past the horizon {horizon}",
                d.slot
            )));
        }
        let start_age = acc.last_age();
        let interval = acc.push(*d)?;
        intervals.push(interval);
        interval_sums.push(interval_age_sum(interval, start_age));
    }
    let residual = acc.residual(horizon)?;
    Ok(RenewalDecomposition {
        horizon,
        count: acc.count,
        intervals,
        delivery_ages: deliveries.iter().map(|d| d.age).collect(),
        interval_sums,
        residual,
        residual_sum: residual_age_sum(residual, acc.last_age()),
    })
}
