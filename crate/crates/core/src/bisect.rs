//! Bisection on monotone predicates.
//!
//! The predicate may be backed by functions that jump to `+∞`; only the
//! monotonicity of the boolean outcome matters.

use crate::{Error, Result};

/// Stopping rule for [`threshold`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_iter: usize,
}

impl Tolerance {
    pub const fn relative(rel: f64) -> Self {
        Tolerance {
            abs: 0.0,
            rel,
            max_iter: 200,
        }
    }

    pub const fn absolute(abs: f64) -> Self {
        Tolerance {
            abs,
            rel: 0.0,
            max_iter: 200,
        }
    }

    fn done(&self, lo: f64, hi: f64) -> bool {
        hi - lo <= self.abs + self.rel * hi.abs()
    }
}

/// Locates the switching point of a predicate that is `false` below some
/// threshold and `true` above it.
///
/// Requires `pred(hi)`; returns `lo` directly when `pred(lo)` already holds.
/// Otherwise the returned point always satisfies the predicate and lies within
/// the tolerance of the threshold.
pub fn threshold<P>(mut lo: f64, mut hi: f64, mut pred: P, tol: Tolerance) -> Result<f64>
where
    P: FnMut(f64) -> bool,
{
    if !(lo <= hi) {
        return Err(Error::OutOfRange(format!("empty bracket [{lo}, {hi}]")));
    }
    if pred(lo) {
        return Ok(lo);
    }
    if !pred(hi) {
        return Err(Error::NoConvergence(format!(
            "predicate false at upper end {hi}"
        )));
    }
    for _ in 0..tol.max_iter {
        if tol.done(lo, hi) {
            return Ok(hi);
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            // adjacent floats
            return Ok(hi);
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if tol.done(lo, hi) {
        Ok(hi)
    } else {
        Err(Error::NoConvergence(format!(
            "bracket [{lo}, {hi}] after {} iterations",
            tol.max_iter
        )))
    }
}

/// Grows or shrinks `start` geometrically until it brackets the switching
/// point of a monotone predicate. Returns `(lo, hi)` with `!pred(lo)` and
/// `pred(hi)`, or `(hi, hi)` if the predicate holds at every probed point.
pub fn bracket<P>(start: f64, mut pred: P) -> Result<(f64, f64)>
where
    P: FnMut(f64) -> bool,
{
    if !(start > 0.0 && start.is_finite()) {
        return Err(Error::OutOfRange(format!(
            "bracket start must be positive and finite, got {start}"
        )));
    }
    let mut probe = start;
    if pred(probe) {
        for _ in 0..2100 {
            let next = probe * 0.5;
            if next == 0.0 {
                return Ok((probe, probe));
            }
            if !pred(next) {
                return Ok((next, probe));
            }
            probe = next;
        }
        Ok((probe, probe))
    } else {
        for _ in 0..2100 {
            let next = probe * 2.0;
            if !next.is_finite() {
                break;
            }
            if pred(next) {
                return Ok((probe, next));
            }
            probe = next;
        }
        Err(Error::NoConvergence(format!(
            "no upper bracket found from {start}"
        )))
    }
}
