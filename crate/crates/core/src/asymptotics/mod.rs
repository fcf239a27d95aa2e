//! Families of maps `n -> f_n` and their finite-grid accessibility verdicts.
//!
//! A family is accessible when `sup ||f_n|| < inf` and `Q[f_n] -> 0`, and it
//! comes from linear maps when moreover `||f_n - u_n|| -> 0` for some linear
//! `u_n`. On a finite grid these limits become trends in three columns:
//! sampled norm, quasilinearity bounds, and distance lower bounds.

mod derivation;
mod families;

use std::fmt;

use rayon::prelude::*;

pub use derivation::{
    derivation_gap, idempotent_decay, kp_derivation, kp_derivation_variant, leibniz_defect, random_dense_pair,
    DerivationKind, LeibnizDefect,
};
pub use families::{
    centring_map, kp_family, kp_index_capped_family, kp_unscaled_family, linear_family, ribe_family,
    standard_witnesses, truncation_family, truncation_norm, MapFamily,
};

use crate::distance::{best_dist_lower_bound, DistMethod};
use crate::error::{Error, Result};
use crate::estimation::estimate_q;
use crate::maps::HomogeneousMap;
use crate::sampling::{derive_seed, Purpose, UnitSphereSampler};
use crate::scalar::{cst, Scalar};
use crate::spaces::hom_map_norm_estimate;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds<T> {
    /// `Q` counts as small below this.
    pub tau_q: T,
    /// Distance counts as small below this.
    pub tau_d: T,
    /// Distance counts as separated at or above this.
    pub tau_sep: T,
    /// A strictly decreasing certified `Q` column must also shrink by this
    /// factor from the first to the last row to count as vanishing.
    pub decay_ratio: T,
    /// Largest matrix size `m * n` for the linear fit behind the
    /// ultraproduct verdict.
    pub heuristic_param_cap: usize,
    /// Search tolerance for the symmetric distance bound.
    pub dist_tol: T,
}

impl<T: Scalar> Default for Thresholds<T> {
    fn default() -> Self {
        Self {
            tau_q: cst(0.05),
            tau_d: cst(0.05),
            tau_sep: cst(0.25),
            decay_ratio: cst(0.9),
            heuristic_param_cap: 1024,
            dist_tol: cst(1e-9),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    UltraproductOfOperators,
    AccessibleNonUltraproductCandidate,
    NotAccessible,
    Inconclusive,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::UltraproductOfOperators => "ultraproduct-of-operators",
            Self::AccessibleNonUltraproductCandidate => "accessible-non-ultraproduct-candidate",
            Self::NotAccessible => "not-accessible",
            Self::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccessibilityRow<T> {
    pub n: usize,
    pub norm_est: T,
    pub q_sampled_lb: T,
    pub q_certified_ub: Option<T>,
    pub dist_lb: T,
    pub dist_method: DistMethod,
    /// Sampled `||f_n - u_n||` for a fitted linear `u_n`; only computed on
    /// the last row, and only when the ultraproduct verdict depends on it.
    pub heuristic_dist: Option<T>,
}

impl<T: Scalar> AccessibilityRow<T> {
    pub fn notes(&self) -> String {
        let mut parts = vec![format!("dist:{}", self.dist_method.as_str())];
        if self.q_certified_ub.is_none() {
            parts.push("q_ub:none".to_string());
        }
        if let Some(h) = self.heuristic_dist {
            parts.push(format!("heuristic_dist:{}", h.to_f64_lossy()));
        }
        parts.join(";")
    }
}

#[derive(Debug, Clone)]
pub struct AccessibilityReport<T> {
    pub label: String,
    pub rows: Vec<AccessibilityRow<T>>,
    pub classification: Classification,
    pub thresholds: Thresholds<T>,
    pub seed: u64,
}

fn strictly_decreasing<T: PartialOrd>(v: &[T]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn strictly_increasing<T: PartialOrd>(v: &[T]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

/// Whether the certified `Q` column tends to zero: either its last entry is
/// below `tau_q`, or it is strictly decreasing and has shrunk by
/// `decay_ratio`.
fn q_vanishing_cert<T: Scalar>(rows: &[AccessibilityRow<T>], th: &Thresholds<T>) -> bool {
    let Some(ub) = rows.iter().map(|r| r.q_certified_ub).collect::<Option<Vec<T>>>() else {
        return false;
    };
    let (first, last) = (ub[0], ub[ub.len() - 1]);
    last < th.tau_q || (strictly_decreasing(&ub) && last <= th.decay_ratio * first)
}

fn q_stalls<T: Scalar>(rows: &[AccessibilityRow<T>], th: &Thresholds<T>) -> bool {
    let last = rows[rows.len() - 1].q_sampled_lb;
    if last < th.tau_q || q_vanishing_cert(rows, th) {
        return false;
    }
    let uncertified = rows.iter().any(|r| r.q_certified_ub.is_none());
    let lb: Vec<T> = rows.iter().map(|r| r.q_sampled_lb).collect();
    !(uncertified && strictly_decreasing(&lb))
}

/// Strictly increasing norms whose growth over the grid exceeds the number
/// of grid points.
fn norm_diverges<T: Scalar>(rows: &[AccessibilityRow<T>]) -> bool {
    let norms: Vec<T> = rows.iter().map(|r| r.norm_est).collect();
    let (first, last) = (norms[0], norms[norms.len() - 1]);
    strictly_increasing(&norms) && last > crate::scalar::from_usize::<T>(norms.len()) * first
}

/// The verdict as a pure function of the rows and thresholds.
///
/// Checked in order: not-accessible (sampled `Q` stays above `tau_q` with
/// no vanishing certificate, or the norm diverges), candidate (vanishing
/// certificate, bounded norm, distance at least `tau_sep` on every row),
/// ultraproduct (small `Q`, last distance bound and fitted distance below
/// `tau_d`), else inconclusive.
pub fn classify<T: Scalar>(rows: &[AccessibilityRow<T>], th: &Thresholds<T>) -> Result<Classification> {
    if rows.len() < 3 {
        return Err(Error::GridTooShort { len: rows.len(), min: 3 });
    }
    if q_stalls(rows, th) || norm_diverges(rows) {
        return Ok(Classification::NotAccessible);
    }
    let q_small = q_vanishing_cert(rows, th);
    if q_small && rows.iter().all(|r| r.dist_lb >= th.tau_sep) {
        return Ok(Classification::AccessibleNonUltraproductCandidate);
    }
    let last = &rows[rows.len() - 1];
    let q_trends_to_zero = q_small || last.q_sampled_lb < th.tau_q;
    if q_trends_to_zero && last.dist_lb < th.tau_d && last.heuristic_dist.is_some_and(|h| h < th.tau_d) {
        return Ok(Classification::UltraproductOfOperators);
    }
    Ok(Classification::Inconclusive)
}

fn needs_heuristic<T: Scalar>(rows: &[AccessibilityRow<T>], th: &Thresholds<T>) -> bool {
    if q_stalls(rows, th) || norm_diverges(rows) {
        return false;
    }
    let last = &rows[rows.len() - 1];
    (q_vanishing_cert(rows, th) || last.q_sampled_lb < th.tau_q) && last.dist_lb < th.tau_d
}

/// Sampled `||f - u||` for the linear map `u` fitted by [`centring_map`],
/// or `None` when the fit would exceed `param_cap` entries.
pub fn fitted_linear_distance<T: Scalar>(
    f: &HomogeneousMap<T>,
    budget: usize,
    seed: u64,
    param_cap: usize,
) -> Result<Option<T>> {
    let symmetric = f.commutes_with_signed_perms() && f.is_endomorphism() && f.codomain().is_normed();
    if !symmetric && f.domain().dim() * f.codomain().dim() > param_cap {
        return Ok(None);
    }
    let u = centring_map(f, seed)?;
    let residual = f.minus_linear(&u)?;
    Ok(Some(truncation_norm(&residual, budget, seed)))
}

fn build_row<T: Scalar>(
    f: &HomogeneousMap<T>,
    n: usize,
    budget: usize,
    seed: u64,
    th: &Thresholds<T>,
) -> Result<AccessibilityRow<T>> {
    let sampler = UnitSphereSampler::new(derive_seed(seed, Purpose::UnitSphere, 0));
    let norm_est = hom_map_norm_estimate(f, &sampler, budget, &standard_witnesses(n));
    let q = estimate_q(f, budget, seed)?;
    let dist = best_dist_lower_bound(f, th.dist_tol, seed);
    Ok(AccessibilityRow {
        n,
        norm_est,
        q_sampled_lb: q.sampled_lower,
        q_certified_ub: q.certified_upper,
        dist_lb: dist.value,
        dist_method: dist.method,
        heuristic_dist: None,
    })
}

pub fn accessibility_report<T: Scalar>(
    family: &MapFamily<T>,
    budget: usize,
    seed: u64,
) -> Result<AccessibilityReport<T>> {
    accessibility_report_with(family, budget, seed, &Thresholds::default())
}

/// Fills one row per grid point (in parallel, each with its own derived
/// seed) and classifies the result.
pub fn accessibility_report_with<T: Scalar>(
    family: &MapFamily<T>,
    budget: usize,
    seed: u64,
    th: &Thresholds<T>,
) -> Result<AccessibilityReport<T>> {
    let grid = family.grid();
    if grid.len() < 3 {
        return Err(Error::GridTooShort { len: grid.len(), min: 3 });
    }
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    let mut rows: Vec<AccessibilityRow<T>> = grid
        .par_iter()
        .map(|&n| {
            let f = family.build(n)?;
            build_row(&f, n, budget, derive_seed(seed, Purpose::Row, n as u64), th)
        })
        .collect::<Result<_>>()?;

    if needs_heuristic(&rows, th) {
        let last = rows.len() - 1;
        let n = rows[last].n;
        let f = family.build(n)?;
        let row_seed = derive_seed(seed, Purpose::Row, n as u64);
        rows[last].heuristic_dist = fitted_linear_distance(&f, budget, row_seed, th.heuristic_param_cap)?;
    }
    let classification = classify(&rows, th)?;
    Ok(AccessibilityReport { label: family.label().to_string(), rows, classification, thresholds: *th, seed })
}
