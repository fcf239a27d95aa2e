//! Lower bounds on `dist(f, L(X, Y)) = inf_l ||f - l||` for homogeneous `f`.
//!
//! Two certified mechanisms are provided:
//!
//! * witness certificates: a linear relation `X = sum c_j x_j` forces, for
//!   every linear `l`, `|f(X) - sum c_j f(x_j)| <= ||f - l|| (||X|| + sum |c_j| ||x_j||)`
//!   (with the `q`-th power form of the triangle inequality when the codomain
//!   is only a `q`-norm);
//! * symmetrisation: when `f` commutes with every signed permutation and the
//!   codomain is normed, averaging any linear `l` over the group gives a
//!   multiple `alpha I` that is no farther from `f`, so
//!   `min_alpha max_j ||f(x_j) - alpha x_j|| / ||x_j||` bounds the distance.
//!
//! [`best_linear_heuristic`] is an uncertified minimax fit used where an
//! explicit near-optimal linear map is needed.

use crate::error::{Error, Result};
use crate::group::SignedPermutation;
use crate::linalg::Matrix;
use crate::maps::HomogeneousMap;
use crate::optimize::golden_section;
use crate::sampling::{gaussian, stream, Purpose};
use crate::scalar::{cst, from_usize, Scalar};
use crate::spaces::{PNormedSpace, Vector};

#[derive(Debug, Clone)]
pub struct WitnessCertificate<T> {
    pub points: Vec<Vector<T>>,
    pub coefficients: Vec<T>,
    pub target: Vector<T>,
    pub value: T,
    /// Exponent of the triangle inequality used (1 for normed codomains).
    pub triangle_exponent: T,
}

impl<T: Scalar> WitnessCertificate<T> {
    /// Recomputes `value` from scratch.
    pub fn recompute(&self, f: &HomogeneousMap<T>) -> T {
        certificate_value(f, &self.points, &self.coefficients, &self.target)
    }

    /// Residual `max |sum c_j x_j - target|`.
    pub fn reconstruction_residual(&self) -> T {
        reconstruct(&self.points, &self.coefficients, self.target.dim()).max_abs_diff(&self.target)
    }
}

fn reconstruct<T: Scalar>(points: &[Vector<T>], coefficients: &[T], dim: usize) -> Vector<T> {
    points.iter().zip(coefficients).fold(Vector::zeros(dim), |acc, (x, c)| acc.axpy(*c, x))
}

fn certificate_value<T: Scalar>(
    f: &HomogeneousMap<T>,
    points: &[Vector<T>],
    coefficients: &[T],
    target: &Vector<T>,
) -> T {
    let q = f.codomain().triangle_exponent();
    let dom = f.domain();
    let mut residual = f.apply(target);
    let mut denom = dom.norm(target).powf(q);
    for (x, c) in points.iter().zip(coefficients) {
        residual = residual.axpy(-*c, &f.apply(x));
        denom += (c.abs() * dom.norm(x)).powf(q);
    }
    if denom == T::zero() {
        return T::zero();
    }
    f.codomain().norm(&residual) / denom.powf(q.recip())
}

/// Builds and evaluates the certificate for the relation
/// `target = sum_j coefficients[j] * points[j]`.
pub fn witness_certificate<T: Scalar>(
    f: &HomogeneousMap<T>,
    points: Vec<Vector<T>>,
    coefficients: Vec<T>,
    target: Vector<T>,
) -> Result<WitnessCertificate<T>> {
    if points.is_empty() {
        return Err(Error::EmptyWitnesses);
    }
    if points.len() != coefficients.len() {
        return Err(Error::CoefficientCount { points: points.len(), coefficients: coefficients.len() });
    }
    f.domain().check(&target)?;
    for x in &points {
        f.domain().check(x)?;
    }
    let rebuilt = reconstruct(&points, &coefficients, target.dim());
    let residual = rebuilt.max_abs_diff(&target);
    let scale = T::one().max(target.max_abs());
    if residual > cst::<T>(1e-9) * scale {
        return Err(Error::ReconstructionMismatch { residual: residual.to_f64_lossy() });
    }
    let value = certificate_value(f, &points, &coefficients, &target);
    Ok(WitnessCertificate { points, coefficients, target, value, triangle_exponent: f.codomain().triangle_exponent() })
}

/// The certificate `s_n = e_1 + ... + e_n`.
pub fn basis_sum_certificate<T: Scalar>(f: &HomogeneousMap<T>) -> Result<WitnessCertificate<T>> {
    let n = f.domain().dim();
    let points = (0..n).map(|i| Vector::basis(n, i)).collect();
    witness_certificate(f, points, vec![T::one(); n], Vector::ones(n))
}

/// Value of [`basis_sum_certificate`] without materialising the points.
pub fn basis_sum_value<T: Scalar>(f: &HomogeneousMap<T>) -> T {
    let n = f.domain().dim();
    let q = f.codomain().triangle_exponent();
    let target = Vector::ones(n);
    let mut residual = f.apply(&target);
    for i in 0..n {
        residual = &residual - &f.apply(&Vector::basis(n, i));
    }
    let denom = (f.domain().norm(&target).powf(q) + from_usize::<T>(n)).powf(q.recip());
    f.codomain().norm(&residual) / denom
}

/// `(1/2) log n`, the distance from Ribe's functional on `l_1^n` to the dual.
pub fn ribe_dist_lower_bound<T: Scalar>(n: usize) -> T {
    from_usize::<T>(n).ln() / cst(2.0)
}

/// Coefficient `alpha = trace(l) / n` of the signed-permutation average of
/// `l`, which equals `alpha I`.
pub fn symmetrize_linear<T: Scalar>(l: &Matrix<T>) -> Result<T> {
    l.mean_diagonal()
}

/// Spot-checks `f(u x) = u f(x)` on `trials` random signed permutations.
pub fn check_signed_perm_commutation<T: Scalar>(f: &HomogeneousMap<T>, trials: usize, seed: u64) -> Result<()> {
    if !f.is_endomorphism() {
        return Err(Error::CommutationFailed(format!("{} is not an endomorphism", f.label())));
    }
    let n = f.domain().dim();
    for t in 0..trials as u64 {
        let mut rng = stream(seed, Purpose::Group, t);
        let u = SignedPermutation::random(n, &mut rng);
        let x = Vector::from_fn(n, |_| gaussian::<T, _>(&mut rng));
        let lhs = f.apply(&u.apply(&x));
        let rhs = u.apply(&f.apply(&x));
        let scale = T::one().max(rhs.max_abs());
        let diff = lhs.max_abs_diff(&rhs);
        if diff > cst::<T>(1e-9) * scale {
            return Err(Error::CommutationFailed(format!("{}: |f(ux) - u f(x)| = {diff:e} at trial {t}", f.label())));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricOptions<T> {
    /// Search tolerance, subtracted from the reported bound.
    pub tol: T,
    /// Random signed permutations used to verify commutation.
    pub commutation_trials: usize,
    pub seed: u64,
    /// Return a flagged heuristic value instead of failing when the map does
    /// not commute with the group.
    pub allow_heuristic: bool,
}

impl<T: Scalar> Default for SymmetricOptions<T> {
    fn default() -> Self {
        Self { tol: cst(1e-9), commutation_trials: 32, seed: 0, allow_heuristic: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricBound<T> {
    pub value: T,
    pub alpha: T,
    /// Set when the commutation precondition failed; `value` is then not a
    /// certified bound.
    pub heuristic: bool,
}

/// `min_alpha max_j ||f(x_j) - alpha x_j|| / ||x_j|| - tol`.
pub fn dist_lb_symmetric<T: Scalar>(
    f: &HomogeneousMap<T>,
    witnesses: &[Vector<T>],
    opts: &SymmetricOptions<T>,
) -> Result<SymmetricBound<T>> {
    if witnesses.is_empty() {
        return Err(Error::EmptyWitnesses);
    }
    if !f.codomain().is_normed() {
        return Err(Error::InvalidArgument(format!(
            "symmetrisation needs a normed codomain, got p = {}",
            f.codomain().p()
        )));
    }
    let verified =
        f.commutes_with_signed_perms() && check_signed_perm_commutation(f, opts.commutation_trials, opts.seed).is_ok();
    if !verified && !opts.allow_heuristic {
        let why = if f.commutes_with_signed_perms() { "spot check failed" } else { "map not flagged as symmetric" };
        return Err(Error::CommutationFailed(format!("{}: {why}", f.label())));
    }

    let dom = f.domain();
    let mut units = Vec::with_capacity(witnesses.len());
    for (j, x) in witnesses.iter().enumerate() {
        dom.check(x)?;
        let nx = dom.norm(x);
        if nx == T::zero() {
            return Err(Error::ZeroWitness(j));
        }
        units.push((x.scaled(nx.recip()), f.apply(x).scaled(nx.recip())));
    }
    let cod = *f.codomain();
    let objective = |alpha: T| units.iter().map(|(x, fx)| cod.norm(&fx.axpy(-alpha, x))).fold(T::zero(), T::max);
    let bracket = units.iter().map(|(_, fx)| cod.norm(fx)).fold(T::zero(), T::max) * cst(2.0);
    let min = golden_section(objective, -bracket, bracket, opts.tol / cst(2.0), 10_000);
    Ok(SymmetricBound { value: (min.value - opts.tol).max(T::zero()), alpha: min.arg, heuristic: !verified })
}

#[derive(Debug, Clone)]
pub struct LinearFit<T> {
    pub matrix: Matrix<T>,
    /// Sampled minimax objective at `matrix`. Not a bound on the distance
    /// in either direction.
    pub est: T,
}

/// Minimises `max_j ||f(x_j) - l x_j|| / ||x_j||` over matrices `l` by
/// subgradient descent with Polyak steps and random restarts.
///
/// When the samples contain every unit vector the descent starts from the
/// matrix interpolating `f` on the basis, which is exact for linear `f`.
pub fn best_linear_heuristic<T: Scalar>(
    f: &HomogeneousMap<T>,
    samples: &[Vector<T>],
    iters: usize,
    seed: u64,
) -> Result<LinearFit<T>> {
    const RESTARTS: u64 = 3;
    if samples.is_empty() {
        return Err(Error::EmptyWitnesses);
    }
    let dom = f.domain();
    let cod = *f.codomain();
    let (n, m) = (dom.dim(), cod.dim());
    let mut data = Vec::with_capacity(samples.len());
    let mut basis_hits = vec![None; n];
    for (j, x) in samples.iter().enumerate() {
        dom.check(x)?;
        let nx = dom.norm(x);
        if nx == T::zero() {
            return Err(Error::ZeroWitness(j));
        }
        let (xu, fu) = (x.scaled(nx.recip()), f.apply(x).scaled(nx.recip()));
        if let Some(i) = single_support(&xu) {
            if basis_hits[i].is_none() {
                basis_hits[i] = Some(fu.scaled(xu[i].recip()));
            }
        }
        data.push((xu, fu));
    }

    let start = if basis_hits.iter().all(Option::is_some) {
        let cols: Vec<Vector<T>> = basis_hits.into_iter().flatten().collect();
        Matrix::from_columns(&cols)
    } else {
        Matrix::zeros(m, n)
    };

    let eval = |l: &Matrix<T>| -> (T, usize) {
        let mut worst = (T::neg_infinity(), 0);
        for (j, (x, fx)) in data.iter().enumerate() {
            let r = cod.norm(&(fx - &l.apply(x)));
            if r > worst.0 {
                worst = (r, j);
            }
        }
        worst
    };

    let (mut best_value, _) = eval(&start);
    let mut best = start.clone();
    let tiny = T::epsilon() * cst(16.0);
    for restart in 0..RESTARTS {
        if best_value <= tiny {
            break;
        }
        let mut l = start.clone();
        if restart > 0 {
            let mut rng = stream(seed, Purpose::Heuristic, restart);
            let amp = best_value / from_usize::<T>(n * m).sqrt();
            for v in l.as_mut_slice() {
                *v += amp * gaussian::<T, _>(&mut rng);
            }
        }
        let (mut value, mut active) = eval(&l);
        let mut local_best = value;
        let mut gap = value / cst(2.0);
        let mut stall = 0usize;
        for _ in 0..iters {
            if value <= tiny || gap <= tiny {
                break;
            }
            let (x, fx) = &data[active];
            let residual = fx - &l.apply(x);
            let g = norm_gradient(&residual, cod);
            // d/dl of ||fx - l x|| is -g x^T
            let gnorm2 = g.iter().fold(T::zero(), |a, v| a + *v * *v) * x.iter().fold(T::zero(), |a, v| a + *v * *v);
            if gnorm2 == T::zero() {
                break;
            }
            let step = (value - (local_best - gap)) / gnorm2;
            for i in 0..m {
                for k in 0..n {
                    let cur = l.get(i, k);
                    l.set(i, k, cur + step * g[i] * x[k]);
                }
            }
            (value, active) = eval(&l);
            if value < local_best {
                local_best = value;
                stall = 0;
                if value < best_value {
                    best_value = value;
                    best = l.clone();
                }
            } else {
                stall += 1;
                if stall >= 10 {
                    gap /= cst(2.0);
                    stall = 0;
                }
            }
        }
    }
    Ok(LinearFit { matrix: best, est: best_value.max(T::zero()) })
}

fn single_support<T: Scalar>(x: &Vector<T>) -> Option<usize> {
    let mut idx = None;
    for (k, v) in x.iter().enumerate() {
        if *v != T::zero() {
            if idx.is_some() {
                return None;
            }
            idx = Some(k);
        }
    }
    idx
}

/// Gradient of `r -> ||r||_q` (a subgradient at kinks).
fn norm_gradient<T: Scalar>(r: &Vector<T>, space: PNormedSpace<T>) -> Vector<T> {
    let q = space.p().value();
    let norm = space.norm(r);
    if norm == T::zero() {
        return Vector::zeros(r.dim());
    }
    if q == T::one() || r.dim() == 1 {
        return r.map(|v| {
            if v > T::zero() {
                T::one()
            } else if v < T::zero() {
                -T::one()
            } else {
                T::zero()
            }
        });
    }
    r.map(|v| if v == T::zero() { T::zero() } else { v.signum() * (v.abs() / norm).powf(q - T::one()) })
}

/// How a reported distance bound was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistMethod {
    BasisCertificate,
    Symmetric,
}

impl DistMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::BasisCertificate => "basis-certificate",
            Self::Symmetric => "signed-perm-average",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceBound<T> {
    pub value: T,
    pub method: DistMethod,
}

/// The larger of the basis-sum certificate and, for symmetric maps with a
/// normed codomain, the symmetrised bound on `{e_1, s_n}`. Always certified.
pub fn best_dist_lower_bound<T: Scalar>(f: &HomogeneousMap<T>, tol: T, seed: u64) -> DistanceBound<T> {
    let mut best = DistanceBound { value: basis_sum_value(f), method: DistMethod::BasisCertificate };
    if f.commutes_with_signed_perms() && f.is_endomorphism() && f.codomain().is_normed() {
        let n = f.domain().dim();
        let witnesses = [Vector::basis(n, 0), Vector::ones(n)];
        let opts = SymmetricOptions { tol, seed, ..SymmetricOptions::default() };
        if let Ok(b) = dist_lb_symmetric(f, &witnesses, &opts) {
            if !b.heuristic && b.value > best.value {
                best = DistanceBound { value: b.value, method: DistMethod::Symmetric };
            }
        }
    }
    best
}

/// `count` seeded samples from the unit sphere of `space`.
pub fn random_unit_samples<T: Scalar>(space: &PNormedSpace<T>, count: usize, seed: u64) -> Vec<Vector<T>> {
    let sampler = crate::sampling::UnitSphereSampler::new(seed);
    (0..count as u64).map(|i| sampler.sample(space, i)).collect()
}
