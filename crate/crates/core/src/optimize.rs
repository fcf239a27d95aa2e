//! Golden-section search on a bracket.

use crate::scalar::{cst, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum<T> {
    pub arg: T,
    pub value: T,
    /// Width of the final bracket.
    pub width: T,
}

/// Minimises a unimodal `f` on `[lo, hi]` until the bracket is narrower than
/// `xtol` (or `max_iter` is reached). Returns the better of the two interior
/// probes and the bracket midpoint.
pub fn golden_section<T: Scalar>(f: impl Fn(T) -> T, lo: T, hi: T, xtol: T, max_iter: usize) -> Minimum<T> {
    let inv_phi = (cst::<T>(5.0).sqrt() - T::one()) / cst(2.0);
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iter = 0;
    while b - a > xtol && iter < max_iter {
        iter += 1;
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let mid = (a + b) / cst(2.0);
    let fm = f(mid);
    let (arg, value) =
        [(c, fc), (d, fd), (mid, fm)]
            .into_iter()
            .fold((mid, fm), |best, cand| if cand.1 < best.1 { cand } else { best });
    Minimum { arg, value, width: b - a }
}
