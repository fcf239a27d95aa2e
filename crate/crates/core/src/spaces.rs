//! Finite-dimensional sequence spaces `l_p^n` and their quasinorms.
//!
//! For `p >= 1` the quasinorm is a norm; for `0 < p < 1` it is a `p`-norm,
//! i.e. `||x + y||^p <= ||x||^p + ||y||^p`, with concavity modulus at most
//! `2^(1/p - 1)`.

use std::fmt;
use std::ops::{Add, Index, Neg, Sub};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::maps::HomogeneousMap;
use crate::sampling::UnitSphereSampler;
use crate::scalar::{cst, from_usize, Scalar};

/// Exponent `p` of an `l_p` quasinorm. Always finite and positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PExponent<T>(T);

impl<T: Scalar> PExponent<T> {
    pub fn new(p: T) -> Result<Self> {
        if p.is_finite() && p > T::zero() {
            Ok(Self(p))
        } else {
            Err(Error::InvalidExponent(p.to_f64_lossy()))
        }
    }

    pub fn one() -> Self {
        Self(T::one())
    }

    #[inline]
    pub fn value(self) -> T {
        self.0
    }

    /// True when the quasinorm is a genuine norm.
    #[inline]
    pub fn is_normed(self) -> bool {
        self.0 >= T::one()
    }

    /// `min(p, 1)`: the exponent of the subadditive power of the quasinorm.
    #[inline]
    pub fn triangle_exponent(self) -> T {
        self.0.min(T::one())
    }

    /// `max(1, 2^(1/p - 1))`.
    pub fn concavity_modulus(self) -> T {
        let two = cst::<T>(2.0);
        two.powf(self.0.recip() - T::one()).max(T::one())
    }
}

impl<T: Scalar> fmt::Display for PExponent<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `(sum |x_k|^p)^(1/p)` over a raw slice, rejecting non-finite entries.
pub fn p_quasinorm<T: Scalar>(x: &[T], p: PExponent<T>) -> Result<T> {
    if let Some(index) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    Ok(quasinorm_unchecked(x, p))
}

// Rescaled by the largest entry so that large or tiny coordinates do not
// overflow in the p-th powers.
pub(crate) fn quasinorm_unchecked<T: Scalar>(x: &[T], p: PExponent<T>) -> T {
    let p = p.value();
    if p == T::one() {
        return x.iter().fold(T::zero(), |acc, v| acc + v.abs());
    }
    let m = x.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
    if m == T::zero() {
        return T::zero();
    }
    if p == cst(2.0) {
        let s = x.iter().fold(T::zero(), |acc, v| {
            let r = *v / m;
            acc + r * r
        });
        return m * s.sqrt();
    }
    let s = x.iter().fold(T::zero(), |acc, v| acc + (v.abs() / m).powf(p));
    m * s.powf(p.recip())
}

/// The Aoki-Rolewicz exponent for concavity modulus `delta`: the `p` with
/// `2 = (2 delta)^p`.
pub fn aoki_rolewicz_exponent<T: Scalar>(delta: T) -> Result<PExponent<T>> {
    if !(delta.is_finite() && delta >= T::one()) {
        return Err(Error::InvalidModulus(delta.to_f64_lossy()));
    }
    let two = cst::<T>(2.0);
    PExponent::new(two.ln() / (two * delta).ln())
}

/// A finite real vector with finite coordinates.
#[derive(Clone, PartialEq)]
pub struct Vector<T>(Vec<T>);

impl<T: Scalar> Vector<T> {
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if let Some(index) = coords.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(coords))
    }

    /// Wraps coordinates produced by internal arithmetic on finite inputs.
    pub(crate) fn from_raw(coords: Vec<T>) -> Self {
        Self(coords)
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize) -> T) -> Self {
        Self((0..dim).map(f).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![T::zero(); dim])
    }

    /// Unit vector `e_i` (0-based `i`).
    pub fn basis(dim: usize, i: usize) -> Self {
        assert!(i < dim, "basis index {i} out of range for dimension {dim}");
        let mut v = vec![T::zero(); dim];
        v[i] = T::one();
        Self(v)
    }

    /// Partial sum `s_m = e_1 + ... + e_m` inside dimension `dim`.
    pub fn partial_sum(dim: usize, m: usize) -> Self {
        assert!(m <= dim, "partial sum length {m} exceeds dimension {dim}");
        Self::from_fn(dim, |k| if k < m { T::one() } else { T::zero() })
    }

    /// `s_n`, the all-ones vector.
    pub fn ones(dim: usize) -> Self {
        Self(vec![T::one(); dim])
    }

    /// Indicator of coordinates `offset .. offset + len`.
    pub fn block(dim: usize, offset: usize, len: usize) -> Self {
        assert!(offset + len <= dim);
        Self::from_fn(dim, |k| if k >= offset && k < offset + len { T::one() } else { T::zero() })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|v| *v == T::zero())
    }

    pub fn max_abs(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, v| acc.max(v.abs()))
    }

    pub fn sum(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, v| acc + *v)
    }

    pub fn norm(&self, p: PExponent<T>) -> T {
        quasinorm_unchecked(&self.0, p)
    }

    pub fn scaled(&self, t: T) -> Self {
        Self(self.0.iter().map(|v| *v * t).collect())
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self(self.0.iter().map(|v| f(*v)).collect())
    }

    /// Coordinatewise product.
    pub fn hadamard(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self(self.0.iter().zip(&other.0).map(|(a, b)| *a * *b).collect())
    }

    /// `self + t * other`.
    pub fn axpy(&self, t: T, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self(self.0.iter().zip(&other.0).map(|(a, b)| *a + t * *b).collect())
    }

    /// First `n` coordinates.
    pub fn leading(&self, n: usize) -> Self {
        Self(self.0[..n].to_vec())
    }

    /// Zero-extend to dimension `dim`.
    pub fn padded(&self, dim: usize) -> Self {
        assert!(dim >= self.dim());
        let mut v = self.0.clone();
        v.resize(dim, T::zero());
        Self(v)
    }

    pub fn with_coord(&self, k: usize, value: T) -> Self {
        let mut v = self.0.clone();
        v[k] = value;
        Self(v)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).abs()))
    }
}

impl<T: fmt::Debug> fmt::Debug for Vector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl<T> Index<usize> for Vector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T: Scalar> Add for &Vector<T> {
    type Output = Vector<T>;
    fn add(self, rhs: Self) -> Vector<T> {
        self.axpy(T::one(), rhs)
    }
}

impl<T: Scalar> Sub for &Vector<T> {
    type Output = Vector<T>;
    fn sub(self, rhs: Self) -> Vector<T> {
        self.axpy(-T::one(), rhs)
    }
}

impl<T: Scalar> Neg for &Vector<T> {
    type Output = Vector<T>;
    fn neg(self) -> Vector<T> {
        self.scaled(-T::one())
    }
}

/// `l_p^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PNormedSpace<T> {
    dim: usize,
    p: PExponent<T>,
}

impl<T: Scalar> PNormedSpace<T> {
    pub fn new(dim: usize, p: PExponent<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(Self { dim, p })
    }

    /// The scalar field as a one-dimensional space.
    pub fn real_line() -> Self {
        Self { dim: 1, p: PExponent::one() }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn p(&self) -> PExponent<T> {
        self.p
    }

    pub fn concavity_modulus(&self) -> T {
        self.p.concavity_modulus()
    }

    pub fn is_normed(&self) -> bool {
        self.p.is_normed() || self.dim == 1
    }

    /// Exponent `q` for which `||x + y||^q <= ||x||^q + ||y||^q` holds.
    pub fn triangle_exponent(&self) -> T {
        if self.dim == 1 {
            T::one()
        } else {
            self.p.triangle_exponent()
        }
    }

    pub fn norm(&self, x: &Vector<T>) -> T {
        debug_assert_eq!(x.dim(), self.dim);
        x.norm(self.p)
    }

    pub fn check(&self, x: &Vector<T>) -> Result<()> {
        if x.dim() == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim, actual: x.dim() })
        }
    }

    /// `n^(-1/p) s_n`, the normalised all-ones vector.
    pub fn uniform_unit(&self) -> Vector<T> {
        let n = from_usize::<T>(self.dim);
        Vector::ones(self.dim).scaled(n.powf(-self.p.value().recip()))
    }
}

/// Lower estimate of `||f|| = sup_{||x|| = 1} ||f(x)||` from `budget` unit
/// sphere samples plus the caller's witness points (normalised before use).
pub fn hom_map_norm_estimate<T: Scalar>(
    f: &HomogeneousMap<T>,
    sampler: &UnitSphereSampler,
    budget: usize,
    witnesses: &[Vector<T>],
) -> T {
    let domain = f.domain();
    let codomain = f.codomain();
    let ratio = |x: &Vector<T>| {
        let nx = domain.norm(x);
        if nx == T::zero() {
            T::zero()
        } else {
            codomain.norm(&f.apply(x)) / nx
        }
    };
    let best_witness = witnesses.iter().map(ratio).fold(T::zero(), T::max);
    let best_sample =
        (0..budget as u64).into_par_iter().map(|i| ratio(&sampler.sample(domain, i))).reduce(T::zero, T::max);
    best_witness.max(best_sample)
}
