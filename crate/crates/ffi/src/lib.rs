//! C ABI over `bcast_aoi`.
//!
//! Every fallible function returns a [`BcastStatus`] and writes results
//! through out-pointers. On failure the message is kept per thread and can
//! be read with [`bcast_last_error_message`]. Handles are created with
//! `*_new` and must be released with the matching `*_free`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, UnwindSafe};

use bcast_aoi::analysis::{
    lower_bound, min_mw_upper_bound, mw_upper_bound, optimize_randomized, optimize_uncoded, randomized_ewsaoi,
};
use bcast_aoi::policy::{mw_choose, mw_choose_uncoded};
use bcast_aoi::sim::{replicate, run_replicates, SimConfig};
use bcast_aoi::{Action, ActionWeights, AgeWeights, AoiState, ChannelParams, ErasurePair, Error, Policy};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcastStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidChannel = 2,
    InvalidWeights = 3,
    InvalidState = 4,
    InvalidConfig = 5,
    Degenerate = 6,
    NeverServed = 7,
    Io = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcastPolicyKind {
    Randomized = 0,
    MaxWeight = 1,
}

/// Ages `h1, h2` and overheard-packet ages `w1, w2` (0 when empty).
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BcastState {
    pub h1: u64,
    pub h2: u64,
    pub w1: u64,
    pub w2: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BcastSummary {
    pub mean: f64,
    /// NaN when `reps == 1`.
    pub ci_halfwidth: f64,
    pub std_error: f64,
    pub reps: u32,
}

/// Opaque channel handle.
pub struct BcastChannel {
    params: ChannelParams,
}

/// Opaque simulator handle.
pub struct BcastSimulator {
    config: SimConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> BcastStatus {
    match err {
        Error::InvalidChannel(_) => BcastStatus::InvalidChannel,
        Error::InvalidAgeWeights(_) | Error::InvalidActionWeights(_) => BcastStatus::InvalidWeights,
        Error::InvalidState(_) | Error::InvalidDeliveryLog(_) => BcastStatus::InvalidState,
        Error::InvalidConfig(_) | Error::Parse { .. } => BcastStatus::InvalidConfig,
        Error::Degenerate(_) => BcastStatus::Degenerate,
        Error::NeverServed(_) => BcastStatus::NeverServed,
        Error::Io(_) => BcastStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn guard<F: FnOnce() -> Result<(), Failure> + UnwindSafe>(f: F) -> BcastStatus {
    match catch_unwind(f) {
        Ok(Ok(())) => BcastStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            BcastStatus::NullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            BcastStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn write<T>(p: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    p.write(value);
    Ok(())
}

unsafe fn read_mu(mu: *const f64) -> Result<ActionWeights, Failure> {
    if mu.is_null() {
        return Err(Failure::Null("mu"));
    }
    let m = std::slice::from_raw_parts(mu, 3);
    Ok(ActionWeights::new(m[0], m[1], m[2])?)
}

unsafe fn write_mu(out: *mut f64, mu: &ActionWeights) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out_mu"));
    }
    std::slice::from_raw_parts_mut(out, 3).copy_from_slice(&mu.as_array());
    Ok(())
}

fn to_state(s: &BcastState) -> Result<AoiState, Error> {
    AoiState::new(s.h1, s.h2, s.w1, s.w2)
}

fn from_state(s: AoiState) -> BcastState {
    BcastState { h1: s.h1, h2: s.h2, w1: s.w1, w2: s.w2 }
}

/// Message of the last failure on this thread. Valid until the next failing
/// call on the same thread.
#[no_mangle]
pub extern "C" fn bcast_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Channel with marginal erasure probabilities `eps1`, `eps2` and joint
/// erasure probability `eps12 <= min(eps1, eps2)`.
#[no_mangle]
pub unsafe extern "C" fn bcast_channel_new(
    eps1: f64,
    eps2: f64,
    eps12: f64,
    out: *mut *mut BcastChannel,
) -> BcastStatus {
    guard(|| {
        let params = ChannelParams::overhearing_model(eps1, eps2, eps12)?;
        write(out, Box::into_raw(Box::new(BcastChannel { params })), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn bcast_channel_free(channel: *mut BcastChannel) {
    if !channel.is_null() {
        drop(Box::from_raw(channel));
    }
}

/// Whether a joint erasure law with these marginals exists.
#[no_mangle]
pub unsafe extern "C" fn bcast_channel_is_realizable(channel: *const BcastChannel) -> bool {
    channel.as_ref().is_some_and(|c| c.params.is_realizable())
}

#[no_mangle]
pub unsafe extern "C" fn bcast_lower_bound(channel: *const BcastChannel, alpha1: f64, out: *mut f64) -> BcastStatus {
    guard(|| {
        let c = deref(channel, "channel")?;
        let a = AgeWeights::from_alpha1(alpha1)?;
        write(out, lower_bound(&a, &c.params), "out")
    })
}

/// `mu` points to three action probabilities.
#[no_mangle]
pub unsafe extern "C" fn bcast_randomized_ewsaoi(
    channel: *const BcastChannel,
    alpha1: f64,
    mu: *const f64,
    out: *mut f64,
) -> BcastStatus {
    guard(|| {
        let c = deref(channel, "channel")?;
        let v = randomized_ewsaoi(&AgeWeights::from_alpha1(alpha1)?, &read_mu(mu)?, &c.params)?;
        write(out, v, "out")
    })
}

/// Best randomized policy; with `coded == false` the third probability is
/// fixed at zero. `out_mu` receives three values.
#[no_mangle]
pub unsafe extern "C" fn bcast_optimize_randomized(
    channel: *const BcastChannel,
    alpha1: f64,
    coded: bool,
    tolerance: f64,
    out_mu: *mut f64,
    out_value: *mut f64,
) -> BcastStatus {
    guard(|| {
        let c = deref(channel, "channel")?;
        let a = AgeWeights::from_alpha1(alpha1)?;
        let opt = if coded {
            optimize_randomized(&a, &c.params, tolerance)?
        } else {
            optimize_uncoded(&a, &c.params, tolerance)?
        };
        write_mu(out_mu, &opt.mu)?;
        write(out_value, opt.value, "out_value")
    })
}

/// Max-Weight upper bound at the given `mu`.
#[no_mangle]
pub unsafe extern "C" fn bcast_mw_upper_bound(
    channel: *const BcastChannel,
    alpha1: f64,
    mu: *const f64,
    out: *mut f64,
) -> BcastStatus {
    guard(|| {
        let c = deref(channel, "channel")?;
        let v = mw_upper_bound(&AgeWeights::from_alpha1(alpha1)?, &read_mu(mu)?, &c.params)?;
        write(out, v, "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn bcast_min_mw_upper_bound(
    channel: *const BcastChannel,
    alpha1: f64,
    tolerance: f64,
    out_mu: *mut f64,
    out_value: *mut f64,
) -> BcastStatus {
    guard(|| {
        let c = deref(channel, "channel")?;
        let opt = min_mw_upper_bound(&AgeWeights::from_alpha1(alpha1)?, &c.params, tolerance)?;
        write_mu(out_mu, &opt.mu)?;
        write(out_value, opt.value, "out_value")
    })
}

/// One slot of the age dynamics. `action` is 1, 2 or 3; `z1`, `z2` tell
/// whether each user received the transmission.
#[no_mangle]
pub unsafe extern "C" fn bcast_state_step(
    state: *const BcastState,
    action: u8,
    z1: bool,
    z2: bool,
    out: *mut BcastState,
) -> BcastStatus {
    guard(|| {
        let s = to_state(deref(state, "state")?)?;
        let a = Action::from_number(action)
            .ok_or_else(|| Error::InvalidConfig(format!("action must be 1, 2 or 3, got {action}")))?;
        write(out, from_state(s.step(a, ErasurePair::new(z1, z2))), "out")
    })
}

/// Max-Weight action number (1, 2 or 3) for `state`; `coded == false`
/// restricts the choice to 1 and 2.
#[no_mangle]
pub unsafe extern "C" fn bcast_mw_choose(
    channel: *const BcastChannel,
    alpha1: f64,
    state: *const BcastState,
    coded: bool,
    out_action: *mut u8,
) -> BcastStatus {
    guard(|| {
        let c = deref(channel, "channel")?;
        let s = to_state(deref(state, "state")?)?;
        let a = AgeWeights::from_alpha1(alpha1)?;
        let action = if coded { mw_choose(&s, &a, &c.params) } else { mw_choose_uncoded(&s, &a, &c.params) };
        write(out_action, action.number(), "out_action")
    })
}

/// `mu` is read only for randomized policies and may be null otherwise.
#[no_mangle]
pub unsafe extern "C" fn bcast_simulator_new(
    channel: *const BcastChannel,
    alpha1: f64,
    kind: BcastPolicyKind,
    coded: bool,
    mu: *const f64,
    horizon: u64,
    reps: u32,
    seed: u64,
    out: *mut *mut BcastSimulator,
) -> BcastStatus {
    guard(|| {
        let c = deref(channel, "channel")?;
        let policy = match kind {
            BcastPolicyKind::Randomized => Policy::Randomized(read_mu(mu)?),
            BcastPolicyKind::MaxWeight => Policy::MaxWeight { coded: true },
        };
        let policy = if coded { policy } else { policy.uncoded()? };
        let config = SimConfig::new(policy, c.params, AgeWeights::from_alpha1(alpha1)?)
            .with_horizon(horizon)
            .with_reps(reps)
            .with_seed(seed);
        config.validate()?;
        write(out, Box::into_raw(Box::new(BcastSimulator { config })), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn bcast_simulator_free(sim: *mut BcastSimulator) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Starts from state `initial` (null means `(1,1,0,0)`).
#[no_mangle]
pub unsafe extern "C" fn bcast_simulator_set_initial(sim: *mut BcastSimulator, initial: *const BcastState) -> BcastStatus {
    guard(|| {
        let sim = sim.as_mut().ok_or(Failure::Null("sim"))?;
        let s = if initial.is_null() { AoiState::INITIAL } else { to_state(&*initial)? };
        sim.config = sim.config.clone().with_initial(s);
        Ok(())
    })
}

/// Runs all replicates. Identical handles give identical summaries.
#[no_mangle]
pub unsafe extern "C" fn bcast_simulator_run(sim: *const BcastSimulator, out: *mut BcastSummary) -> BcastStatus {
    guard(|| {
        let cfg = &deref(sim, "sim")?.config;
        let summary = if cfg.reps >= 2 {
            let s = replicate(cfg)?;
            BcastSummary { mean: s.mean, ci_halfwidth: s.ci_halfwidth, std_error: s.std_error, reps: cfg.reps }
        } else {
            let r = run_replicates(cfg)?;
            BcastSummary { mean: r[0].ewsaoi, ci_halfwidth: f64::NAN, std_error: f64::NAN, reps: 1 }
        };
        write(out, summary, "out")
    })
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn bcast_status_name(status: BcastStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        BcastStatus::Ok => b"ok\0",
        BcastStatus::NullPointer => b"null pointer\0",
        BcastStatus::InvalidChannel => b"invalid channel\0",
        BcastStatus::InvalidWeights => b"invalid weights\0",
        BcastStatus::InvalidState => b"invalid state\0",
        BcastStatus::InvalidConfig => b"invalid config\0",
        BcastStatus::Degenerate => b"degenerate\0",
        BcastStatus::NeverServed => b"never served\0",
        BcastStatus::Io => b"i/o error\0",
        BcastStatus::Panic => b"panic\0",
    };
    s.as_ptr().cast()
}
