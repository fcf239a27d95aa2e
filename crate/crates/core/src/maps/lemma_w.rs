//! Grid study of `|omega(s + t) - omega(s) - omega(t)| / (|s| + |t|)`, whose
//! supremum is `log 2`.

use rayon::prelude::*;

use super::omega;
use crate::error::{Error, Result};
use crate::scalar::{cst, from_usize, Scalar};

/// The ratio, taken as 0 at the origin.
pub fn omega_defect_ratio<T: Scalar>(s: T, t: T) -> T {
    let denom = s.abs() + t.abs();
    if denom == T::zero() {
        return T::zero();
    }
    (omega(s + t) - omega(s) - omega(t)).abs() / denom
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaWRow<T> {
    pub s: T,
    /// Maximiser over the `t` grid for this `s`.
    pub t: T,
    pub max_ratio: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaWScan<T> {
    pub rows: Vec<LemmaWRow<T>>,
    pub max: T,
    pub argmax: (T, T),
}

/// Scans the square `[lo, hi]^2` with grid points `lo + i * step`.
pub fn lemma_w_scan<T: Scalar>(lo: T, hi: T, step: T) -> Result<LemmaWScan<T>> {
    if !(step > T::zero() && step.is_finite()) {
        return Err(Error::InvalidArgument(format!("grid step {step} must be positive")));
    }
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::InvalidArgument(format!("grid range [{lo}, {hi}] is empty")));
    }
    let count = ((hi - lo) / step + cst::<T>(1e-9)).floor().to_usize().unwrap_or(0) + 1;
    let point = |i: usize| lo + from_usize::<T>(i) * step;
    let rows: Vec<LemmaWRow<T>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let s = point(i);
            let mut best = LemmaWRow { s, t: point(0), max_ratio: T::neg_infinity() };
            for j in 0..count {
                let t = point(j);
                let r = omega_defect_ratio(s, t);
                if r > best.max_ratio {
                    best.t = t;
                    best.max_ratio = r;
                }
            }
            best
        })
        .collect();
    let top = rows.iter().fold(rows[0], |a, r| if r.max_ratio > a.max_ratio { *r } else { a });
    Ok(LemmaWScan { max: top.max_ratio, argmax: (top.s, top.t), rows })
}
