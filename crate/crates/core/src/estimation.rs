//! Sampled lower bounds for the quasilinearity constant
//!
//! `Q[f] = sup ||f(x+y) - f(x) - f(y)|| / (||x|| + ||y||)`
//!
//! paired with the certified upper bounds carried by the maps.
//!
//! The search evaluates a fixed list of structured pairs (unit vectors,
//! partial sums, disjoint blocks), then `budget` random pairs, then runs a
//! multiplicative coordinate ascent from the best structured pair and from
//! every running record of the random sequence. Random pair `i` depends only
//! on `(seed, i)` and the record set of a longer run contains that of any
//! shorter run, so the returned bound is monotone in the budget.

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::maps::{quasilinearity_defect, HomogeneousMap};
use crate::sampling::{gaussian, stream, uniform, Purpose};
use crate::scalar::{cst, Scalar};
use crate::spaces::Vector;

pub use crate::maps::{certified_q_upper, MapKind};

#[derive(Debug, Clone)]
pub struct QEstimate<T> {
    pub sampled_lower: T,
    pub certified_upper: Option<T>,
    pub witness_pair: (Vector<T>, Vector<T>),
    pub samples_used: usize,
    pub seed: u64,
}

impl<T: Scalar> QEstimate<T> {
    /// `sampled_lower <= certified_upper` up to rounding (vacuous without a
    /// certificate). A violation means a bug or a wrong certificate.
    pub fn is_consistent(&self) -> bool {
        let slack = T::epsilon() * cst(1024.0);
        self.certified_upper.is_none_or(|q| self.sampled_lower <= q + slack * (T::one() + q))
    }

    /// Re-evaluates the defect at the stored witness pair.
    pub fn reproduce(&self, f: &HomogeneousMap<T>) -> Result<T> {
        quasilinearity_defect(f, &self.witness_pair.0, &self.witness_pair.1)
    }
}

/// Knobs of the local ascent stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscentConfig {
    pub rounds: usize,
    /// Coordinates tried per round; all `2n` when `2n` is not larger.
    pub coords_per_round: usize,
    pub initial_step: f64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        Self { rounds: 50, coords_per_round: 32, initial_step: 0.25 }
    }
}

pub fn estimate_q<T: Scalar>(f: &HomogeneousMap<T>, budget: usize, seed: u64) -> Result<QEstimate<T>> {
    estimate_q_with(f, budget, seed, &AscentConfig::default())
}

pub fn estimate_q_with<T: Scalar>(
    f: &HomogeneousMap<T>,
    budget: usize,
    seed: u64,
    ascent: &AscentConfig,
) -> Result<QEstimate<T>> {
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    let n = f.domain().dim();

    let structured = structured_pairs::<T>(n);
    let mut best = Candidate::zero(n);
    for (x, y) in &structured {
        best.offer(quasilinearity_defect(f, x, y)?, x, y);
    }
    let mut starts = vec![(u64::MAX, best.x.clone(), best.y.clone())];

    let values: Vec<T> = (0..budget as u64)
        .into_par_iter()
        .map(|i| {
            let (x, y) = random_pair::<T>(n, seed, i);
            quasilinearity_defect(f, &x, &y).unwrap_or(T::zero())
        })
        .collect();

    let mut running = T::neg_infinity();
    for (i, v) in values.iter().enumerate() {
        if *v > running {
            running = *v;
            let (x, y) = random_pair::<T>(n, seed, i as u64);
            best.offer(*v, &x, &y);
            starts.push((i as u64, x, y));
        }
    }

    let refined: Vec<(T, Vector<T>, Vector<T>)> =
        starts.par_iter().map(|(id, x, y)| local_ascent(f, x, y, seed, *id, ascent)).collect();
    for (v, x, y) in &refined {
        best.offer(*v, x, y);
    }

    Ok(QEstimate {
        sampled_lower: best.value,
        certified_upper: f.q_certified_upper(),
        witness_pair: (best.x, best.y),
        samples_used: structured.len() + budget,
        seed,
    })
}

struct Candidate<T> {
    value: T,
    x: Vector<T>,
    y: Vector<T>,
}

impl<T: Scalar> Candidate<T> {
    fn zero(n: usize) -> Self {
        Self { value: T::zero(), x: Vector::basis(n, 0), y: Vector::zeros(n) }
    }

    fn offer(&mut self, value: T, x: &Vector<T>, y: &Vector<T>) {
        if value > self.value {
            self.value = value;
            self.x = x.clone();
            self.y = y.clone();
        }
    }
}

/// Pairs built from the extremal configurations: `(e_1, e_2)`, partial sums
/// `s_k` against `+-s_m`, and disjoint consecutive blocks.
pub fn structured_pairs<T: Scalar>(n: usize) -> Vec<(Vector<T>, Vector<T>)> {
    let mut pairs = Vec::new();
    if n >= 2 {
        pairs.push((Vector::basis(n, 0), Vector::basis(n, 1)));
        pairs.push((Vector::basis(n, 0), -&Vector::basis(n, 1)));
    }
    let mut sizes: Vec<usize> = std::iter::successors(Some(1usize), |k| Some(k * 2)).take_while(|k| *k <= n).collect();
    if sizes.last() != Some(&n) {
        sizes.push(n);
    }
    for &k in &sizes {
        for &m in &sizes {
            let a = Vector::partial_sum(n, k);
            let b = Vector::partial_sum(n, m);
            if k != m {
                pairs.push((a.clone(), b.clone()));
            }
            pairs.push((a, -&b));
            if k + m <= n {
                pairs.push((Vector::block(n, 0, k), Vector::block(n, k, m)));
                pairs.push((Vector::block(n, 0, k), Vector::block(n, k, m).scaled(-T::one())));
            }
        }
    }
    pairs
}

/// Random pair number `index` for `seed`: a mixture of dense Gaussian,
/// sparse, and block-constant vectors with independent relative scale.
pub fn random_pair<T: Scalar>(n: usize, seed: u64, index: u64) -> (Vector<T>, Vector<T>) {
    let mut rng = stream(seed, Purpose::DefectPair, index);
    let x = random_vector(n, &mut rng);
    let y = random_vector(n, &mut rng);
    let scale: T = uniform::<T, _>(&mut rng, -4.0, 4.0).exp();
    (x, y.scaled(scale))
}

fn random_vector<T: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vector<T> {
    match rng.random_range(0..3u8) {
        0 => Vector::from_fn(n, |_| gaussian::<T, _>(rng)),
        1 => {
            let k = rng.random_range(1..=n);
            let mut v = vec![T::zero(); n];
            for i in sample_indices(rng, n, k) {
                v[i] = gaussian::<T, _>(rng);
            }
            Vector::from_raw(v)
        }
        _ => {
            let k = rng.random_range(1..=n);
            let sign = if rng.random::<bool>() { T::one() } else { -T::one() };
            let mut v = vec![T::zero(); n];
            for i in sample_indices(rng, n, k) {
                v[i] = sign;
            }
            Vector::from_raw(v)
        }
    }
}

fn local_ascent<T: Scalar>(
    f: &HomogeneousMap<T>,
    x0: &Vector<T>,
    y0: &Vector<T>,
    seed: u64,
    start_id: u64,
    cfg: &AscentConfig,
) -> (T, Vector<T>, Vector<T>) {
    let n = x0.dim();
    let mut x = x0.clone();
    let mut y = y0.clone();
    let mut best = quasilinearity_defect(f, &x, &y).unwrap_or(T::zero());
    let mut step = cst::<T>(cfg.initial_step);
    let mut rng = stream(seed, Purpose::Ascent, start_id);
    for _ in 0..cfg.rounds {
        let coords: Vec<usize> = if 2 * n <= cfg.coords_per_round {
            (0..2 * n).collect()
        } else {
            sample_indices(&mut rng, 2 * n, cfg.coords_per_round).into_vec()
        };
        let mut improved = false;
        for c in coords {
            let (target, k) = if c < n { (&x, c) } else { (&y, c - n) };
            let current = target[k];
            if current == T::zero() {
                continue;
            }
            for factor in [T::one() + step, T::one() - step] {
                let moved = target.with_coord(k, current * factor);
                let (cx, cy) = if c < n { (&moved, &y) } else { (&x, &moved) };
                let Ok(d) = quasilinearity_defect(f, cx, cy) else { continue };
                if d > best {
                    best = d;
                    if c < n {
                        x = moved;
                    } else {
                        y = moved;
                    }
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step /= cst(2.0);
        }
    }
    (best, x, y)
}

/// `dist_lb / Q_certified(f)`: a lower bound for the approximation constant
/// `K_0` of the ambient pair of spaces witnessed by this single map.
pub fn k0_lower_bound<T: Scalar>(f: &HomogeneousMap<T>, dist_lb: T) -> Result<T> {
    let q = f.q_certified_upper().ok_or_else(|| Error::MissingCertificate(f.label().to_string()))?;
    k0_from_bounds(dist_lb, q)
}

/// Same as [`k0_lower_bound`] with the certificate given explicitly.
pub fn k0_from_bounds<T: Scalar>(dist_lb: T, q_certified: T) -> Result<T> {
    if dist_lb == T::zero() {
        return Ok(T::zero());
    }
    if q_certified.is_nan() || q_certified <= T::zero() {
        return Err(Error::InvalidArgument(format!(
            "distance bound {dist_lb} > 0 with quasilinearity certificate {q_certified}"
        )));
    }
    Ok(dist_lb / q_certified)
}
