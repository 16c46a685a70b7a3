//! Smallest passing constant for a monotone pass/fail predicate.

use crate::error::{Error, Result};

/// Values below this are not distinguished from zero.
pub const CALIBRATION_FLOOR: f64 = 1e-6;
/// Final bracket ratio between the reported passing value and a failing one.
pub const CALIBRATION_RATIO: f64 = 1.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub value: f64,
    pub evaluations: usize,
    /// The predicate held all the way down to the floor.
    pub floor_hit: bool,
}

/// Starts at 1, doubles until the predicate passes (or halves while it does),
/// then bisects geometrically until the passing value is within a factor
/// 1.1 of a failing one. The predicate is assumed monotone in M.
pub fn calibrate_constant(mut passes: impl FnMut(f64) -> Result<bool>) -> Result<Calibration> {
    let mut evaluations = 0;
    let mut check = |m: f64, n: &mut usize| -> Result<bool> {
        *n += 1;
        passes(m)
    };
    let (mut good, mut bad);
    if check(1.0, &mut evaluations)? {
        good = 1.0;
        loop {
            let m = good / 2.0;
            if m < CALIBRATION_FLOOR {
                if check(CALIBRATION_FLOOR, &mut evaluations)? {
                    return Ok(Calibration { value: CALIBRATION_FLOOR, evaluations, floor_hit: true });
                }
                bad = CALIBRATION_FLOOR;
                break;
            }
            if check(m, &mut evaluations)? {
                good = m;
            } else {
                bad = m;
                break;
            }
        }
    } else {
        bad = 1.0;
        let mut m = 2.0;
        loop {
            if check(m, &mut evaluations)? {
                good = m;
                break;
            }
            bad = m;
            m *= 2.0;
            if m > 1e12 {
                return Err(Error::Construction("no passing constant up to 1e12".into()));
            }
        }
    }
    while good / bad > CALIBRATION_RATIO {
        let mid = (good * bad).sqrt();
        if check(mid, &mut evaluations)? {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(Calibration { value: good, evaluations, floor_hit: false })
}
