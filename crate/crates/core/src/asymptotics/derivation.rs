//! The normalised Kalton-Peck derivation `D_n(x)_k = x_k log(||x|| / |x_k|) / log n`
//! on `l_p^n` with coordinatewise products, and its Leibniz defect.

use crate::error::{Error, Result};
use crate::sampling::{gaussian, stream, uniform, Purpose};
use crate::scalar::{from_usize, Scalar};
use crate::spaces::{PExponent, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivationKind {
    /// `x_k log(||x||_p / |x_k|) / log n`
    Homogeneous,
    /// `x_k log(1 / |x_k|) / log n`
    Variant,
}

fn check_index(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::IndexTooSmall { n, min: 2 });
    }
    Ok(())
}

fn check_dim<T: Scalar>(x: &Vector<T>, n: usize) -> Result<()> {
    if x.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: x.dim() });
    }
    Ok(())
}

// x log(c / |x|), with 0 log(1/0) = 0.
fn xlog<T: Scalar>(v: T, log_c: T) -> T {
    if v == T::zero() {
        T::zero()
    } else {
        v * (log_c - v.abs().ln())
    }
}

/// `D_n(x)`.
pub fn kp_derivation<T: Scalar>(x: &Vector<T>, n: usize, p: PExponent<T>) -> Result<Vector<T>> {
    check_index(n)?;
    check_dim(x, n)?;
    Ok(apply(DerivationKind::Homogeneous, x, n, p))
}

/// `D_n^0(x)`, built on `log(1/|x|)`.
pub fn kp_derivation_variant<T: Scalar>(x: &Vector<T>, n: usize) -> Result<Vector<T>> {
    check_index(n)?;
    check_dim(x, n)?;
    Ok(apply(DerivationKind::Variant, x, n, PExponent::one()))
}

fn apply<T: Scalar>(kind: DerivationKind, x: &Vector<T>, n: usize, p: PExponent<T>) -> Vector<T> {
    let log_n = from_usize::<T>(n).ln();
    let log_c = match kind {
        DerivationKind::Homogeneous => {
            let norm = x.norm(p);
            if norm == T::zero() {
                return Vector::zeros(x.dim());
            }
            norm.ln()
        }
        DerivationKind::Variant => T::zero(),
    };
    x.map(|v| xlog(v, log_c) / log_n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeibnizDefect<T> {
    /// `||D(xy) - x D(y) - y D(x)||_p` evaluated term by term.
    pub measured: T,
    /// `|log(||xy|| / (||x|| ||y||))| ||xy|| / log n` for the homogeneous kind.
    pub closed_form: Option<T>,
}

impl<T: Scalar> LeibnizDefect<T> {
    /// `|measured - closed_form| <= rel * closed_form + abs`.
    pub fn agrees(&self, rel: T, abs: T) -> bool {
        self.closed_form.is_none_or(|c| (self.measured - c).abs() <= rel * c + abs)
    }
}

pub fn leibniz_defect<T: Scalar>(
    kind: DerivationKind,
    x: &Vector<T>,
    y: &Vector<T>,
    n: usize,
    p: PExponent<T>,
) -> Result<LeibnizDefect<T>> {
    check_index(n)?;
    check_dim(x, n)?;
    check_dim(y, n)?;
    let xy = x.hadamard(y);
    let d_xy = apply(kind, &xy, n, p);
    let d_x = apply(kind, x, n, p);
    let d_y = apply(kind, y, n, p);
    let residual = &(&d_xy - &x.hadamard(&d_y)) - &y.hadamard(&d_x);
    let measured = residual.norm(p);
    let closed_form = match kind {
        DerivationKind::Homogeneous => {
            let nxy = xy.norm(p);
            Some(if nxy == T::zero() {
                T::zero()
            } else {
                let log_n = from_usize::<T>(n).ln();
                (nxy.ln() - x.norm(p).ln() - y.norm(p).ln()).abs() * nxy / log_n
            })
        }
        DerivationKind::Variant => None,
    };
    Ok(LeibnizDefect { measured, closed_form })
}

/// `||D_n(e)|| / ||e||` for the idempotent `e = s_m` with `m` ones.
pub fn idempotent_decay<T: Scalar>(m: usize, n: usize, p: PExponent<T>) -> Result<T> {
    check_index(n)?;
    if m == 0 || m > n {
        return Err(Error::InvalidArgument(format!("support size {m} must lie in 1..={n}")));
    }
    let e = Vector::partial_sum(n, m);
    Ok(apply(DerivationKind::Homogeneous, &e, n, p).norm(p) / e.norm(p))
}

/// `||D_n(x) - D_n^0(x)||_p`, bounded by `||x|| |log ||x||| / log n`.
pub fn derivation_gap<T: Scalar>(x: &Vector<T>, n: usize, p: PExponent<T>) -> Result<T> {
    let d = kp_derivation(x, n, p)?;
    let d0 = kp_derivation_variant(x, n)?;
    Ok((&d - &d0).norm(p))
}

/// Pair number `index`: dense Gaussian vectors with independent
/// log-uniform scales in `[1/e, e]`.
pub fn random_dense_pair<T: Scalar>(n: usize, seed: u64, index: u64) -> (Vector<T>, Vector<T>) {
    let mut rng = stream(seed, Purpose::Verify, index);
    let mut draw = || {
        let scale: T = uniform::<T, _>(&mut rng, -1.0, 1.0).exp();
        Vector::from_fn(n, |_| gaussian::<T, _>(&mut rng) * scale)
    };
    let x = draw();
    (x, draw())
}
