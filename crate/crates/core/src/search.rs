//! Monotone bisection shared by the ΛVaR engine and the solvers.
//!
//! Every infimum in this crate has the shape `inf{x ≥ 0 : p(x)}` with `p`
//! false-then-true along the half line, so one bracketing routine serves all.

/// Absolute width at which bisection stops.
pub const TOLERANCE: f64 = 1e-9;
/// Hard cap on bisection steps.
pub const MAX_ITERATIONS: usize = 200;

const MAX_DOUBLINGS: usize = 1100;

/// The located switch point of a monotone predicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    /// Best estimate of the infimum; the predicate holds here.
    pub point: f64,
    /// Largest probe at which the predicate failed (`point` itself when it is 0).
    pub below: f64,
}

/// Shrinks `[lo, hi]` with `p(lo) = false`, `p(hi) = true`.
pub fn bisect(mut lo: f64, mut hi: f64, mut pred: impl FnMut(f64) -> bool) -> (f64, f64) {
    for _ in 0..MAX_ITERATIONS {
        if hi - lo <= TOLERANCE {
            break;
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Doubles from `start` until the predicate holds. `None` when it never does
/// on representable reals.
pub fn grow_until(start: f64, mut pred: impl FnMut(f64) -> bool) -> Option<f64> {
    let mut x = if start.is_finite() && start > 0.0 { start } else { 1.0 };
    for _ in 0..MAX_DOUBLINGS {
        if !x.is_finite() {
            return None;
        }
        if pred(x) {
            return Some(x);
        }
        x *= 2.0;
    }
    None
}

/// `inf{x ≥ 0 : pred(x)}` for a false-then-true predicate.
///
/// `hint` is a point believed to satisfy the predicate. After bisection, any
/// of `snap` lying in the final bracket is tried in increasing order, which
/// lands exactly on breakpoints and fixed points the caller knows about.
/// Returns `point = ∞` when no finite point satisfies the predicate.
pub fn infimum(
    mut pred: impl FnMut(f64) -> bool,
    hint: Option<f64>,
    snap: impl Fn(f64, f64) -> Vec<f64>,
) -> Crossing {
    if pred(0.0) {
        return Crossing {
            point: 0.0,
            below: 0.0,
        };
    }
    let hi = match hint.filter(|h| h.is_finite() && *h > 0.0) {
        Some(h) if pred(h) => h,
        Some(h) => match grow_until(h, &mut pred) {
            Some(x) => x,
            None => return unbounded(),
        },
        None => match grow_until(1.0, &mut pred) {
            Some(x) => x,
            None => return unbounded(),
        },
    };
    let (lo, hi) = bisect(0.0, hi, &mut pred);
    let mut candidates = snap(lo, hi);
    candidates.retain(|c| *c > lo && *c < hi);
    candidates.sort_by(f64::total_cmp);
    for c in candidates {
        if pred(c) {
            return Crossing { point: c, below: lo };
        }
    }
    Crossing { point: hi, below: lo }
}

fn unbounded() -> Crossing {
    Crossing {
        point: f64::INFINITY,
        below: f64::INFINITY,
    }
}
