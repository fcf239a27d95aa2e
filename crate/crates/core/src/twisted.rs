//! The twisted sum `Y (+)_phi X`: pairs `(y, x)` with the quasinorm
//! `||(y, x)||_phi = ||y - phi(x)||_Y + ||x||_X`, sitting in the exact sequence
//! `0 -> Y -> Y (+)_phi X -> X -> 0`.

use rayon::prelude::*;

use crate::distance::{best_dist_lower_bound, DistMethod};
use crate::error::{Error, Result};
use crate::estimation::{random_pair, structured_pairs};
use crate::maps::HomogeneousMap;
use crate::sampling::{gaussian, stream, uniform, Purpose};
use crate::scalar::{cst, Scalar};
use crate::spaces::{PNormedSpace, Vector};

#[derive(Debug, Clone, PartialEq)]
pub struct TwistedSumElement<T> {
    pub y: Vector<T>,
    pub x: Vector<T>,
}

impl<T: Scalar> TwistedSumElement<T> {
    pub fn new(y: Vector<T>, x: Vector<T>) -> Self {
        Self { y, x }
    }

    pub fn is_zero(&self) -> bool {
        self.y.is_zero() && self.x.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { y: &self.y + &other.y, x: &self.x + &other.x }
    }

    pub fn scaled(&self, t: T) -> Self {
        Self { y: self.y.scaled(t), x: self.x.scaled(t) }
    }
}

#[derive(Clone)]
pub struct TwistedSumSpace<T> {
    phi: HomogeneousMap<T>,
}

impl<T: Scalar> std::fmt::Debug for TwistedSumSpace<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TwistedSumSpace").field("phi", &self.phi).finish()
    }
}

impl<T: Scalar> TwistedSumSpace<T> {
    /// The twisted sum built from `phi: X -> Y`.
    pub fn new(phi: HomogeneousMap<T>) -> Self {
        Self { phi }
    }

    pub fn x_space(&self) -> &PNormedSpace<T> {
        self.phi.domain()
    }

    pub fn y_space(&self) -> &PNormedSpace<T> {
        self.phi.codomain()
    }

    pub fn phi(&self) -> &HomogeneousMap<T> {
        &self.phi
    }

    fn check(&self, z: &TwistedSumElement<T>) -> Result<()> {
        self.y_space().check(&z.y)?;
        self.x_space().check(&z.x)
    }

    /// `||y - phi(x)||_Y + ||x||_X`.
    pub fn twisted_norm(&self, z: &TwistedSumElement<T>) -> Result<T> {
        self.check(z)?;
        Ok(self.norm_unchecked(z))
    }

    fn norm_unchecked(&self, z: &TwistedSumElement<T>) -> T {
        let fx = self.phi.apply(&z.x);
        self.y_space().norm(&(&z.y - &fx)) + self.x_space().norm(&z.x)
    }

    /// `y -> (y, 0)`.
    pub fn inclusion(&self, y: &Vector<T>) -> Result<TwistedSumElement<T>> {
        self.y_space().check(y)?;
        Ok(TwistedSumElement::new(y.clone(), Vector::zeros(self.x_space().dim())))
    }

    /// `(y, x) -> x`.
    pub fn quotient(&self, z: &TwistedSumElement<T>) -> Result<Vector<T>> {
        self.check(z)?;
        Ok(z.x.clone())
    }

    /// The homogeneous bounded section `x -> (phi(x), x)`.
    pub fn section(&self, x: &Vector<T>) -> Result<TwistedSumElement<T>> {
        self.x_space().check(x)?;
        Ok(TwistedSumElement::new(self.phi.apply(x), x.clone()))
    }

    /// Samples pairs `z_1, z_2` and reports the largest observed
    /// `||z_1 + z_2||_phi / (||z_1||_phi + ||z_2||_phi)`.
    pub fn quasinorm_modulus_report(&self, budget: usize, seed: u64) -> Result<ModulusReport<T>> {
        if budget == 0 {
            return Err(Error::ZeroBudget);
        }
        let n = self.x_space().dim();
        let mut best = (T::zero(), None);
        for (x1, x2) in structured_pairs::<T>(n) {
            for (z1, z2) in [
                (self.section_unchecked(&x1), self.section_unchecked(&x2)),
                (
                    TwistedSumElement::new(Vector::zeros(self.y_space().dim()), x1.clone()),
                    TwistedSumElement::new(Vector::zeros(self.y_space().dim()), x2.clone()),
                ),
            ] {
                let r = self.ratio(&z1, &z2);
                if r > best.0 {
                    best = (r, Some((z1, z2)));
                }
            }
        }
        let sampled = (0..budget as u64)
            .into_par_iter()
            .map(|i| {
                let (z1, z2) = self.random_elements(seed, i);
                (self.ratio(&z1, &z2), i)
            })
            .reduce(|| (T::zero(), u64::MAX), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
        if sampled.0 > best.0 {
            best = (sampled.0, Some(self.random_elements(seed, sampled.1)));
        }
        let normed = self.x_space().is_normed() && self.y_space().is_normed();
        let ceiling = if normed { self.phi.q_certified_upper().map(|q| T::one() + q) } else { None };
        Ok(ModulusReport { empirical: best.0, ceiling, witness: best.1, samples: budget, seed })
    }

    fn section_unchecked(&self, x: &Vector<T>) -> TwistedSumElement<T> {
        TwistedSumElement::new(self.phi.apply(x), x.clone())
    }

    fn ratio(&self, z1: &TwistedSumElement<T>, z2: &TwistedSumElement<T>) -> T {
        let denom = self.norm_unchecked(z1) + self.norm_unchecked(z2);
        if denom == T::zero() {
            return T::zero();
        }
        self.norm_unchecked(&z1.add(z2)) / denom
    }

    /// Pair number `index`: random `x`'s with `y = phi(x) + noise`, where the
    /// noise amplitude ranges over several orders of magnitude so both
    /// near-section and near-inclusion elements occur.
    pub fn random_elements(&self, seed: u64, index: u64) -> (TwistedSumElement<T>, TwistedSumElement<T>) {
        let (x1, x2) = random_pair::<T>(self.x_space().dim(), seed, index);
        let mut rng = stream(seed, Purpose::Row, index);
        let m = self.y_space().dim();
        let mut lift = |x: Vector<T>| {
            let amp: T = uniform::<T, _>(&mut rng, -6.0, 2.0).exp() * self.x_space().norm(&x).max(cst(1e-300));
            let noise = Vector::from_fn(m, |_| gaussian::<T, _>(&mut rng) * amp);
            TwistedSumElement::new(&self.phi.apply(&x) + &noise, x)
        };
        (lift(x1), lift(x2))
    }

    /// Certified distance lower bounds for `phi` restricted to the first `n`
    /// coordinates, for each `n` in `n_grid`. Growth along the column is
    /// numerical evidence that the sequence does not split.
    pub fn splitting_gap(&self, n_grid: &[usize], tol: T, seed: u64) -> Result<Vec<SplittingRow<T>>> {
        n_grid
            .par_iter()
            .map(|&n| {
                let restricted = self.phi.restrict_leading(n)?;
                let b = best_dist_lower_bound(&restricted, tol, seed);
                Ok(SplittingRow { n, dist_lb: b.value, method: b.method })
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct ModulusReport<T> {
    pub empirical: T,
    /// `1 + Q_certified(phi)` when both `X` and `Y` are normed.
    pub ceiling: Option<T>,
    pub witness: Option<(TwistedSumElement<T>, TwistedSumElement<T>)>,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplittingRow<T> {
    pub n: usize,
    pub dist_lb: T,
    pub method: DistMethod,
}
