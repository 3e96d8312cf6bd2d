//! Dimensions of minimal admissible modules for `0 <= r, s <= 8`, with the
//! cells that are not stored reached through (8,0), (0,8) and (4,4)
//! periodicity.

use super::Signature;
use crate::error::{Error, Result};

// Indexed [s][r]. Zero marks a cell the table leaves to periodicity.
const DIMS: [[u64; 9]; 9] = [
    [1, 2, 4, 4, 8, 8, 8, 8, 16],
    [2, 4, 8, 8, 16, 16, 16, 16, 0],
    [4, 4, 8, 8, 16, 16, 32, 32, 0],
    [8, 8, 8, 8, 16, 32, 64, 64, 0],
    [8, 8, 8, 8, 16, 0, 0, 0, 0],
    [16, 16, 16, 16, 0, 0, 0, 0, 0],
    [16, 16, 32, 32, 0, 0, 0, 0, 0],
    [16, 32, 64, 64, 0, 0, 0, 0, 0],
    [16, 0, 0, 0, 0, 0, 0, 0, 0],
];

// Cells marked "x2": two non-equivalent minimal admissible modules.
const TWO_TYPES: [(u32, u32); 6] = [(3, 0), (7, 0), (1, 2), (5, 2), (3, 4), (1, 6)];

/// One periodicity step, each multiplying the minimal dimension by 16.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shift {
    R8,
    S8,
    Both4,
}

impl Shift {
    pub fn offset(self) -> (u32, u32) {
        match self {
            Shift::R8 => (8, 0),
            Shift::S8 => (0, 8),
            Shift::Both4 => (4, 4),
        }
    }
}

pub(crate) fn table_cell(sig: Signature) -> Option<u64> {
    let (r, s) = (sig.r as usize, sig.s as usize);
    if r > 8 || s > 8 {
        return None;
    }
    match DIMS[s][r] {
        0 => None,
        d => Some(d),
    }
}

/// Reduces `sig` to a stored cell. The returned shifts, applied in order
/// to the base cell, rebuild `sig`.
pub fn reduce(sig: Signature) -> (Signature, Vec<Shift>) {
    let mut cur = sig;
    let mut steps = Vec::new();
    while table_cell(cur).is_none() {
        let step = if cur.r >= 4 && cur.s >= 4 {
            Shift::Both4
        } else if cur.r >= 8 {
            Shift::R8
        } else {
            Shift::S8
        };
        let (dr, ds) = step.offset();
        cur = Signature::new(cur.r - dr, cur.s - ds);
        steps.push(step);
    }
    steps.reverse();
    (cur, steps)
}

pub fn min_admissible_dim(sig: Signature) -> Result<u64> {
    if sig.r + sig.s == 0 {
        return Err(Error::EmptySignature);
    }
    let (base, steps) = reduce(sig);
    let d = table_cell(base).expect("reduction ends on a stored cell");
    Ok(d * 16u64.pow(steps.len() as u32))
}

/// True when the signature carries two non-equivalent minimal admissible
/// modules (distinguished by the sign of the volume element).
pub fn has_two_types(sig: Signature) -> bool {
    let (base, _) = reduce(sig);
    TWO_TYPES.contains(&(base.r, base.s))
}
