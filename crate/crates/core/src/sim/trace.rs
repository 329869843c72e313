//! Replays an explicit action/erasure script through the state machine.
//!
//! A script is a comma-separated list of `A:Z1Z2` entries, e.g.
//! `2:11,1:10,1:01,2:10,3:11`, where `A` is the action number and `Z1Z2`
//! are the reception indicators.

use crate::aoi::{Action, AoiState};
use crate::channel::ErasurePair;
use crate::error::{Error, Result};

fn bad(msg: String) -> Error {
    Error::InvalidConfig(msg)
}

fn indicator(c: char, entry: &str) -> Result<bool> {
    match c {
        '0' => Ok(false),
        '1' => Ok(true),
        _ => Err(bad(format!("trace entry '{entry}': reception indicator must be 0 or 1"))),
    }
}

pub fn parse_script(script: &str) -> Result<Vec<(Action, ErasurePair)>> {
    let mut out = Vec::new();
    for entry in script.split(',').map(str::trim).filter(|e| !e.is_empty()) {
        let (a, z) = entry
            .split_once(':')
            .ok_or_else(|| bad(format!("trace entry '{entry}' is not of the form A:Z1Z2")))?;
        let action = a
            .trim()
            .parse::<u8>()
            .ok()
            .and_then(Action::from_number)
            .ok_or_else(|| bad(format!("trace entry '{entry}': action must be 1, 2 or 3")))?;
        let chars: Vec<char> = z.trim().chars().collect();
        if chars.len() != 2 {
            return Err(bad(format!("trace entry '{entry}': expected two reception indicators")));
        }
        out.push((action, ErasurePair::new(indicator(chars[0], entry)?, indicator(chars[1], entry)?)));
    }
    if out.is_empty() {
        return Err(bad("empty trace script".into()));
    }
    Ok(out)
}

/// Parses `h1,h2,w1,w2`.
pub fn parse_state(s: &str) -> Result<AoiState> {
    let parts: Vec<u64> = s
        .split(',')
        .map(|p| p.trim().parse::<u64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| bad(format!("state '{s}': {e}")))?;
    match parts[..] {
        [h1, h2, w1, w2] => AoiState::new(h1, h2, w1, w2),
        _ => Err(bad(format!("state '{s}' must have four entries h1,h2,w1,w2"))),
    }
}

/// States after each scripted slot (the initial state is not included).
pub fn run_trace(initial: AoiState, script: &[(Action, ErasurePair)]) -> Result<Vec<AoiState>> {
    initial.validate()?;
    let mut s = initial;
    Ok(script
        .iter()
        .map(|(a, z)| {
            s = s.step(*a, *z);
            s
        })
        .collect())
}
