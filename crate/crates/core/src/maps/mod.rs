//! The concrete maps: Ribe's function and functional, the Kalton-Peck maps,
//! homogenisation of arbitrary maps, and the quasilinearity defect.

mod lemma_w;
mod profile;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use lemma_w::{lemma_w_scan, omega_defect_ratio, LemmaWRow, LemmaWScan};
pub use profile::LipschitzProfile;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{cst, Scalar};
use crate::spaces::{PExponent, PNormedSpace, Vector};

type EvalFn<T> = Arc<dyn Fn(&[T]) -> Vec<T> + Send + Sync>;

/// Families of maps with a known quasilinearity certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapKind<T> {
    Ribe,
    KaltonPeck { p: PExponent<T>, lip: T },
    Linear,
}

/// Parses `ribe`, `kalton_peck` (alias `kp`) or `linear`; Kalton-Peck
/// parameters default to `p = 1`, `L(theta) = 1` and are set by the caller.
impl<T: Scalar> FromStr for MapKind<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ribe" => Ok(Self::Ribe),
            "kalton_peck" | "kalton-peck" | "kp" => Ok(Self::KaltonPeck { p: PExponent::one(), lip: T::one() }),
            "linear" => Ok(Self::Linear),
            other => Err(Error::UnknownMapKind(other.to_string())),
        }
    }
}

/// An evaluatable homogeneous map between finite-dimensional `l_p` spaces.
///
/// Functionals have the one-dimensional [`PNormedSpace::real_line`] as
/// codomain. `q_certified_upper` carries a proven bound on `Q[f]` when one
/// is known; combinators propagate it.
#[derive(Clone)]
pub struct HomogeneousMap<T> {
    domain: PNormedSpace<T>,
    codomain: PNormedSpace<T>,
    eval: EvalFn<T>,
    q_certified_upper: Option<T>,
    commutes_with_signed_perms: bool,
    linear: bool,
    label: String,
}

impl<T: Scalar> HomogeneousMap<T> {
    /// Wraps an arbitrary map. The caller asserts homogeneity.
    pub fn new(
        label: impl Into<String>,
        domain: PNormedSpace<T>,
        codomain: PNormedSpace<T>,
        eval: impl Fn(&[T]) -> Vec<T> + Send + Sync + 'static,
    ) -> Self {
        Self {
            domain,
            codomain,
            eval: Arc::new(eval),
            q_certified_upper: None,
            commutes_with_signed_perms: false,
            linear: false,
            label: label.into(),
        }
    }

    pub fn with_certificate(mut self, q: T) -> Self {
        self.q_certified_upper = Some(q);
        self
    }

    pub fn with_signed_perm_symmetry(mut self, commutes: bool) -> Self {
        self.commutes_with_signed_perms = commutes;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// The linear map given by `matrix` (rows = codomain dimension).
    pub fn linear(matrix: Matrix<T>, domain_p: PExponent<T>, codomain_p: PExponent<T>) -> Result<Self> {
        let domain = PNormedSpace::new(matrix.cols(), domain_p)?;
        let codomain = PNormedSpace::new(matrix.rows(), codomain_p)?;
        let m = Arc::new(matrix);
        let mut f = Self::new("linear", domain, codomain, move |x| m.apply_slice(x)).with_certificate(T::zero());
        f.linear = true;
        Ok(f)
    }

    /// `alpha * identity` on `space`.
    pub fn scalar_identity(space: PNormedSpace<T>, alpha: T) -> Self {
        let mut f = Self::new("scalar-identity", space, space, move |x| x.iter().map(|v| *v * alpha).collect())
            .with_certificate(T::zero())
            .with_signed_perm_symmetry(true);
        f.linear = true;
        f
    }

    pub fn identity(space: PNormedSpace<T>) -> Self {
        Self::scalar_identity(space, T::one()).with_label("identity")
    }

    pub fn zero(domain: PNormedSpace<T>, codomain: PNormedSpace<T>) -> Self {
        let m = codomain.dim();
        let mut f = Self::new("zero", domain, codomain, move |_| vec![T::zero(); m])
            .with_certificate(T::zero())
            .with_signed_perm_symmetry(domain == codomain);
        f.linear = true;
        f
    }

    /// Ribe's functional on `l_1^n`.
    pub fn ribe(n: usize) -> Result<Self> {
        let domain = PNormedSpace::new(n, PExponent::one())?;
        let q = certified_q_upper::<T>(MapKind::Ribe)?;
        Ok(Self::new("ribe", domain, PNormedSpace::real_line(), |x| vec![ribe_slice(x)]).with_certificate(q))
    }

    /// The Kalton-Peck map `Phi` on `l_p^n` with profile `theta`.
    pub fn kalton_peck(n: usize, theta: LipschitzProfile<T>, p: PExponent<T>) -> Result<Self> {
        let space = PNormedSpace::new(n, p)?;
        let q = certified_q_upper(MapKind::KaltonPeck { p, lip: theta.lip_const() })?;
        Ok(Self::new("kalton-peck", space, space, move |x| kalton_peck_slice(x, &theta, p))
            .with_certificate(q)
            .with_signed_perm_symmetry(true))
    }

    #[inline]
    pub fn domain(&self) -> &PNormedSpace<T> {
        &self.domain
    }

    #[inline]
    pub fn codomain(&self) -> &PNormedSpace<T> {
        &self.codomain
    }

    pub fn q_certified_upper(&self) -> Option<T> {
        self.q_certified_upper
    }

    pub fn commutes_with_signed_perms(&self) -> bool {
        self.commutes_with_signed_perms
    }

    pub fn is_linear(&self) -> bool {
        self.linear
    }

    pub fn is_endomorphism(&self) -> bool {
        self.domain == self.codomain
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Evaluates `f(x)`. Panics on a dimension mismatch.
    pub fn apply(&self, x: &Vector<T>) -> Vector<T> {
        assert_eq!(x.dim(), self.domain.dim(), "{}: input dimension mismatch", self.label);
        let y = (self.eval)(x.as_slice());
        assert_eq!(y.len(), self.codomain.dim(), "{}: output dimension mismatch", self.label);
        Vector::from_raw(y)
    }

    pub fn try_apply(&self, x: &Vector<T>) -> Result<Vector<T>> {
        self.domain.check(x)?;
        Ok(self.apply(x))
    }

    /// `c * f`.
    pub fn scaled(&self, c: T) -> Self {
        let inner = self.eval.clone();
        let mut f = Self::new(format!("{}*{}", c, self.label), self.domain, self.codomain, move |x| {
            inner(x).into_iter().map(|v| v * c).collect()
        })
        .with_signed_perm_symmetry(self.commutes_with_signed_perms);
        f.q_certified_upper = self.q_certified_upper.map(|q| q * c.abs());
        f.linear = self.linear;
        f
    }

    /// `f - l` for a linear map `l` given as a matrix. `Q` is unchanged.
    pub fn minus_linear(&self, l: &Matrix<T>) -> Result<Self> {
        if l.cols() != self.domain.dim() || l.rows() != self.codomain.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.domain.dim() * self.codomain.dim(),
                actual: l.rows() * l.cols(),
            });
        }
        let inner = self.eval.clone();
        let m = Arc::new(l.clone());
        let mut f = Self::new(format!("{}-linear", self.label), self.domain, self.codomain, move |x| {
            let a = inner(x);
            let b = m.apply_slice(x);
            a.into_iter().zip(b).map(|(u, v)| u - v).collect()
        });
        f.q_certified_upper = self.q_certified_upper;
        f.linear = self.linear;
        Ok(f)
    }

    /// Restriction to the span of the first `n` coordinates.
    ///
    /// A map commuting with all signed permutations sends that span into
    /// itself, so for such endomorphisms the codomain is cut down to `l_p^n`
    /// as well; otherwise the codomain is kept.
    pub fn restrict_leading(&self, n: usize) -> Result<Self> {
        let big = self.domain.dim();
        if n == 0 || n > big {
            return Err(Error::DimensionMismatch { expected: big, actual: n });
        }
        let domain = PNormedSpace::new(n, self.domain.p())?;
        let inner = self.eval.clone();
        let shrink = self.commutes_with_signed_perms && self.is_endomorphism();
        let codomain = if shrink { domain } else { self.codomain };
        let mut f = Self::new(format!("{}|E{}", self.label, n), domain, codomain, move |x| {
            let mut padded = x.to_vec();
            padded.resize(big, T::zero());
            let mut y = inner(&padded);
            if shrink {
                y.truncate(n);
            }
            y
        })
        .with_signed_perm_symmetry(shrink);
        f.q_certified_upper = self.q_certified_upper;
        f.linear = self.linear;
        Ok(f)
    }
}

impl<T: Scalar> fmt::Debug for HomogeneousMap<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HomogeneousMap")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("codomain", &self.codomain)
            .field("q_certified_upper", &self.q_certified_upper)
            .field("commutes_with_signed_perms", &self.commutes_with_signed_perms)
            .finish()
    }
}

/// Certified upper bound on `Q[f]` for the known map families:
/// `2 log 2` for Ribe's functional and `10^(1/p) e^-1 L(theta)` for the
/// Kalton-Peck maps.
pub fn certified_q_upper<T: Scalar>(kind: MapKind<T>) -> Result<T> {
    Ok(match kind {
        MapKind::Ribe => cst::<T>(2.0) * T::LN_2(),
        MapKind::KaltonPeck { p, lip } => cst::<T>(10.0).powf(p.value().recip()) / T::E() * lip,
        MapKind::Linear => T::zero(),
    })
}

/// `omega(t) = t log|t|`, with `omega(0) = 0`.
#[inline]
pub fn omega<T: Scalar>(t: T) -> T {
    if t == T::zero() {
        T::zero()
    } else {
        t * t.abs().ln()
    }
}

/// `omega_theta(t) = t theta(-log|t|)`, with `omega_theta(0) = 0`.
#[inline]
pub fn omega_theta<T: Scalar>(t: T, theta: &LipschitzProfile<T>) -> T {
    if t == T::zero() {
        T::zero()
    } else {
        t * theta.eval(-t.abs().ln())
    }
}

/// Ribe's functional via `rho(x) = omega(s(x)) - sum_k omega(x_k)`.
pub fn ribe<T: Scalar>(x: &Vector<T>) -> T {
    ribe_slice(x.as_slice())
}

fn ribe_slice<T: Scalar>(x: &[T]) -> T {
    let s = x.iter().fold(T::zero(), |acc, v| acc + *v);
    x.iter().fold(omega(s), |acc, v| acc - omega(*v))
}

/// The displayed sum `sum_{x_k != 0} x_k log(|s(x)| / |x_k|)`, defined only
/// when `s(x) != 0`.
pub fn ribe_direct<T: Scalar>(x: &Vector<T>) -> Option<T> {
    let s = x.sum();
    if s == T::zero() {
        return None;
    }
    Some(x.iter().filter(|v| **v != T::zero()).fold(T::zero(), |acc, v| acc + *v * (s.abs() / v.abs()).ln()))
}

/// The Kalton-Peck map `Phi(x)_k = x_k theta(log(||x||_p / |x_k|))`.
pub fn kalton_peck<T: Scalar>(x: &Vector<T>, theta: &LipschitzProfile<T>, p: PExponent<T>) -> Vector<T> {
    Vector::from_raw(kalton_peck_slice(x.as_slice(), theta, p))
}

fn kalton_peck_slice<T: Scalar>(x: &[T], theta: &LipschitzProfile<T>, p: PExponent<T>) -> Vec<T> {
    let norm = crate::spaces::quasinorm_unchecked(x, p);
    x.iter().map(|&v| if v == T::zero() { T::zero() } else { v * theta.eval((norm / v.abs()).ln()) }).collect()
}

/// The non-homogeneous map `Phi_0(x)_k = x_k theta(-log|x_k|)`, i.e.
/// `omega_theta` applied coordinatewise.
pub fn kalton_peck_nonhom<T: Scalar>(x: &Vector<T>, theta: &LipschitzProfile<T>) -> Vector<T> {
    x.map(|v| omega_theta(v, theta))
}

/// `u~(x) = (||x|| / 2) (u(x/||x||) - u(-x/||x||))`, `u~(0) = 0`.
pub fn homogenize<T: Scalar>(
    u: impl Fn(&Vector<T>) -> Vector<T> + Send + Sync + 'static,
    domain: PNormedSpace<T>,
    codomain: PNormedSpace<T>,
) -> HomogeneousMap<T> {
    let m = codomain.dim();
    HomogeneousMap::new("homogenized", domain, codomain, move |x| {
        let x = Vector::from_raw(x.to_vec());
        let norm = domain.norm(&x);
        if norm == T::zero() {
            return vec![T::zero(); m];
        }
        let unit = x.scaled(norm.recip());
        let plus = u(&unit);
        let minus = u(&unit.scaled(-T::one()));
        let half = norm / cst(2.0);
        plus.iter().zip(minus.iter()).map(|(a, b)| (*a - *b) * half).collect()
    })
}

/// `||f(x+y) - f(x) - f(y)|| / (||x|| + ||y||)`.
pub fn quasilinearity_defect<T: Scalar>(f: &HomogeneousMap<T>, x: &Vector<T>, y: &Vector<T>) -> Result<T> {
    f.domain().check(x)?;
    f.domain().check(y)?;
    let denom = f.domain().norm(x) + f.domain().norm(y);
    if denom == T::zero() {
        return Err(Error::ZeroPair);
    }
    Ok(defect_numerator(f, x, y) / denom)
}

/// `||f(x+y) - f(x) - f(y)||`, differenced coordinatewise before the norm.
pub(crate) fn defect_numerator<T: Scalar>(f: &HomogeneousMap<T>, x: &Vector<T>, y: &Vector<T>) -> T {
    let fxy = f.apply(&(x + y));
    let fx = f.apply(x);
    let fy = f.apply(y);
    let diff = Vector::from_fn(fxy.dim(), |k| fxy[k] - fx[k] - fy[k]);
    f.codomain().norm(&diff)
}
