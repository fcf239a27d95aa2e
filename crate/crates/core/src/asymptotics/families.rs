//! Built-in families `n -> f_n`.

use std::fmt;
use std::sync::Arc;

use crate::distance::{best_linear_heuristic, dist_lb_symmetric, random_unit_samples, SymmetricOptions};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::maps::{HomogeneousMap, LipschitzProfile};
use crate::sampling::{derive_seed, Purpose, UnitSphereSampler};
use crate::scalar::{cst, from_usize, Scalar};
use crate::spaces::{hom_map_norm_estimate, PExponent, PNormedSpace, Vector};

type Builder<T> = Arc<dyn Fn(usize) -> Result<HomogeneousMap<T>> + Send + Sync>;

/// A family of homogeneous maps indexed by a sorted grid of dimensions.
#[derive(Clone)]
pub struct MapFamily<T> {
    grid: Vec<usize>,
    builder: Builder<T>,
    label: String,
}

impl<T: Scalar> MapFamily<T> {
    pub fn new(
        label: impl Into<String>,
        grid: Vec<usize>,
        builder: impl Fn(usize) -> Result<HomogeneousMap<T>> + Send + Sync + 'static,
    ) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::GridTooShort { len: 0, min: 1 });
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::GridNotSorted);
        }
        Ok(Self { grid, builder: Arc::new(builder), label: label.into() })
    }

    pub fn grid(&self) -> &[usize] {
        &self.grid
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `f_n`, checked to act on an `n`-dimensional domain.
    pub fn build(&self, n: usize) -> Result<HomogeneousMap<T>> {
        let f = (self.builder)(n).map_err(|e| Error::Builder { n, source: Box::new(e) })?;
        if f.domain().dim() != n {
            return Err(Error::Builder {
                n,
                source: Box::new(Error::DimensionMismatch { expected: n, actual: f.domain().dim() }),
            });
        }
        Ok(f)
    }
}

impl<T> fmt::Debug for MapFamily<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MapFamily").field("label", &self.label).field("grid", &self.grid).finish()
    }
}

fn require_min(grid: &[usize], min: usize) -> Result<()> {
    match grid.iter().find(|&&n| n < min) {
        Some(&n) => Err(Error::IndexTooSmall { n, min }),
        None => Ok(()),
    }
}

/// `rho / log n` on `l_1^n`.
pub fn ribe_family<T: Scalar>(grid: Vec<usize>) -> Result<MapFamily<T>> {
    require_min(&grid, 2)?;
    MapFamily::new("ribe", grid, |n| {
        let log_n = from_usize::<T>(n).ln();
        Ok(HomogeneousMap::ribe(n)?.scaled(log_n.recip()).with_label(format!("rho/log({n})")))
    })
}

/// `(p / log n) Phi_{theta_n}` on `l_p^n` with `theta_n = min(t, log n^(1/p))`.
///
/// The normalisation by `||theta_n||_inf = log n / p` keeps `||f_n|| <= 1`
/// while the distance to linear maps stays at `1/2` and the certified
/// quasilinearity constant decays like `1 / log n`.
pub fn kp_family<T: Scalar>(grid: Vec<usize>, p: PExponent<T>) -> Result<MapFamily<T>> {
    require_min(&grid, 2)?;
    MapFamily::new(format!("kp(p={p})"), grid, move |n| {
        let cap = from_usize::<T>(n).ln() / p.value();
        let theta = LipschitzProfile::clamped(cap)?;
        Ok(HomogeneousMap::kalton_peck(n, theta, p)?.scaled(cap.recip()).with_label(format!("kp_log(p={p},n={n})")))
    })
}

/// `Phi_{theta_n} / n` on `l_p^n` with `theta_n = min(t, n)`.
pub fn kp_index_capped_family<T: Scalar>(grid: Vec<usize>, p: PExponent<T>) -> Result<MapFamily<T>> {
    require_min(&grid, 1)?;
    MapFamily::new(format!("kp-index-capped(p={p})"), grid, move |n| {
        let cap = from_usize::<T>(n);
        let theta = LipschitzProfile::clamped(cap)?;
        Ok(HomogeneousMap::kalton_peck(n, theta, p)?.scaled(cap.recip()).with_label(format!("kp_n(p={p},n={n})")))
    })
}

/// `Phi` with the identity profile and no normalisation.
pub fn kp_unscaled_family<T: Scalar>(grid: Vec<usize>, p: PExponent<T>) -> Result<MapFamily<T>> {
    require_min(&grid, 1)?;
    MapFamily::new(format!("kp-unscaled(p={p})"), grid, move |n| {
        HomogeneousMap::kalton_peck(n, LipschitzProfile::identity(), p)
    })
}

/// The identity of `l_p^n`.
pub fn linear_family<T: Scalar>(grid: Vec<usize>, p: PExponent<T>) -> Result<MapFamily<T>> {
    require_min(&grid, 1)?;
    MapFamily::new(format!("linear(p={p})"), grid, move |n| Ok(HomogeneousMap::identity(PNormedSpace::new(n, p)?)))
}

/// Witness points used for norm estimates on `l_p^n`: `e_1` and the
/// partial sums `s_k` for `k` a power of two or `n`.
pub fn standard_witnesses<T: Scalar>(n: usize) -> Vec<Vector<T>> {
    let mut w = vec![Vector::basis(n, 0)];
    let mut k = 2;
    while k < n {
        w.push(Vector::partial_sum(n, k));
        k *= 2;
    }
    if n > 1 {
        w.push(Vector::ones(n));
    }
    w
}

/// Linear map used to centre `f` on its domain: `f` itself when it is
/// linear, the symmetric fit `alpha I`
/// when `f` commutes with signed permutations on normed spaces, otherwise
/// [`best_linear_heuristic`] over the unit vectors, partial sums and
/// random unit samples.
pub fn centring_map<T: Scalar>(f: &HomogeneousMap<T>, seed: u64) -> Result<Matrix<T>> {
    let n = f.domain().dim();
    if f.is_linear() {
        let cols: Vec<Vector<T>> = (0..n).map(|i| f.apply(&Vector::basis(n, i))).collect();
        return Ok(Matrix::from_columns(&cols));
    }
    if f.commutes_with_signed_perms() && f.is_endomorphism() && f.codomain().is_normed() {
        let opts = SymmetricOptions { seed, ..SymmetricOptions::default() };
        if let Ok(b) = dist_lb_symmetric(f, &[Vector::basis(n, 0), Vector::ones(n)], &opts) {
            if !b.heuristic {
                return Ok(Matrix::identity(n).scaled(b.alpha));
            }
        }
    }
    let mut samples: Vec<Vector<T>> = (0..n).map(|i| Vector::basis(n, i)).collect();
    samples.extend((2..=n).filter(|k| k.is_power_of_two() || *k == n).map(|k| Vector::partial_sum(n, k)));
    samples.extend(random_unit_samples(f.domain(), 64, derive_seed(seed, Purpose::Heuristic, n as u64)));
    Ok(best_linear_heuristic(f, &samples, 300, seed)?.matrix)
}

/// Normalised truncations `(phi|E_n - l_n) / d_n` of a map `phi` on
/// `l_p^N`, where `E_n` is the span of the first `n` coordinates, `l_n` is
/// [`centring_map`] and `d_n` is the estimated norm of the numerator.
///
/// `phi` is first divided by its certified quasilinearity constant, so each
/// member carries the certificate `1 / d_n`.
pub fn truncation_family<T: Scalar>(
    phi: &HomogeneousMap<T>,
    grid: Vec<usize>,
    budget: usize,
    seed: u64,
) -> Result<MapFamily<T>> {
    let q = phi.q_certified_upper().ok_or_else(|| Error::MissingCertificate(phi.label().to_string()))?;
    require_min(&grid, 1)?;
    if let Some(&n) = grid.iter().find(|&&n| n > phi.domain().dim()) {
        return Err(Error::DimensionMismatch { expected: phi.domain().dim(), actual: n });
    }
    let base = if q > T::zero() { phi.scaled(q.recip()) } else { phi.clone() };
    let label = format!("truncation:{}", phi.label());
    MapFamily::new(label, grid, move |n| {
        let restricted = base.restrict_leading(n)?;
        let row_seed = derive_seed(seed, Purpose::Row, n as u64);
        let l = centring_map(&restricted, row_seed)?;
        let centred = restricted.minus_linear(&l)?;
        let d = truncation_norm(&centred, budget, row_seed);
        if d.is_nan() || d <= cst(1e-12) {
            return Err(Error::DegenerateTruncation { n, norm: d.to_f64_lossy() });
        }
        let label = format!("{}|E{}", base.label(), n);
        Ok(centred.scaled(d.recip()).with_certificate(d.recip()).with_label(label))
    })
}

/// Norm estimate used for truncations: samples plus every unit vector and
/// the standard witnesses.
pub fn truncation_norm<T: Scalar>(f: &HomogeneousMap<T>, budget: usize, seed: u64) -> T {
    let n = f.domain().dim();
    let mut w: Vec<Vector<T>> = (0..n).map(|i| Vector::basis(n, i)).collect();
    w.extend(standard_witnesses(n));
    hom_map_norm_estimate(f, &UnitSphereSampler::new(seed), budget, &w)
}
