use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

type ProfileFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

#[derive(Clone)]
enum Shape<T> {
    /// `max(t, 0)`
    Ramp,
    /// `min(max(t, 0), cap)`
    Clamp(T),
    Custom(ProfileFn<T>),
}

/// A Lipschitz function `theta` vanishing on `(-inf, 0]`, together with its
/// Lipschitz constant and sup norm (`None` for unbounded profiles).
#[derive(Clone)]
pub struct LipschitzProfile<T> {
    shape: Shape<T>,
    lip: T,
    sup: Option<T>,
    increasing: bool,
}

impl<T: Scalar> LipschitzProfile<T> {
    /// `theta(t) = max(t, 0)`: Lipschitz constant 1, unbounded.
    pub fn identity() -> Self {
        Self { shape: Shape::Ramp, lip: T::one(), sup: None, increasing: true }
    }

    /// `theta_cap(t) = min(max(t, 0), cap)`.
    pub fn clamped(cap: T) -> Result<Self> {
        if !(cap.is_finite() && cap >= T::zero()) {
            return Err(Error::InvalidProfile(format!("clamp level {cap} must be finite and >= 0")));
        }
        Ok(Self { shape: Shape::Clamp(cap), lip: T::one(), sup: Some(cap), increasing: true })
    }

    /// A caller-supplied profile. The declared constants are trusted here;
    /// call [`validate`](Self::validate) to spot-check them.
    pub fn custom(
        theta: impl Fn(T) -> T + Send + Sync + 'static,
        lip: T,
        sup: Option<T>,
        increasing: bool,
    ) -> Result<Self> {
        if !(lip.is_finite() && lip >= T::zero()) {
            return Err(Error::InvalidProfile(format!("Lipschitz constant {lip} must be finite and >= 0")));
        }
        if let Some(s) = sup {
            if !(s.is_finite() && s >= T::zero()) {
                return Err(Error::InvalidProfile(format!("sup norm {s} must be finite and >= 0")));
            }
        }
        Ok(Self { shape: Shape::Custom(Arc::new(theta)), lip, sup, increasing })
    }

    #[inline]
    pub fn eval(&self, t: T) -> T {
        match &self.shape {
            Shape::Ramp => t.max(T::zero()),
            Shape::Clamp(cap) => t.max(T::zero()).min(*cap),
            Shape::Custom(f) => {
                if t <= T::zero() {
                    T::zero()
                } else {
                    f(t)
                }
            }
        }
    }

    pub fn lip_const(&self) -> T {
        self.lip
    }

    pub fn sup_norm(&self) -> Option<T> {
        self.sup
    }

    /// The sup norm, or an error for unbounded profiles.
    pub fn bounded_sup(&self) -> Result<T> {
        self.sup.ok_or(Error::UnboundedProfile)
    }

    pub fn is_increasing(&self) -> bool {
        self.increasing
    }

    /// Spot-checks the declared constants on `samples`.
    pub fn validate(&self, samples: &[T]) -> Result<()> {
        let slack = T::epsilon() * crate::scalar::cst::<T>(64.0);
        for &t in samples {
            let v = self.raw(t);
            if t <= T::zero() && v != T::zero() {
                return Err(Error::InvalidProfile(format!("theta({t}) = {v}, expected 0")));
            }
            if let Some(s) = self.sup {
                if v.abs() > s * (T::one() + slack) + slack {
                    return Err(Error::InvalidProfile(format!("|theta({t})| = {v} exceeds sup {s}")));
                }
            }
        }
        for w in samples.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (self.raw(a), self.raw(b));
            let bound = self.lip * (a - b).abs();
            if (fa - fb).abs() > bound * (T::one() + slack) + slack {
                return Err(Error::InvalidProfile(format!("Lipschitz bound violated between {a} and {b}")));
            }
            if self.increasing && a < b && fa > fb + slack {
                return Err(Error::InvalidProfile(format!("not increasing between {a} and {b}")));
            }
        }
        Ok(())
    }

    // Bypasses the vanishing guard so `validate` sees the underlying function.
    fn raw(&self, t: T) -> T {
        match &self.shape {
            Shape::Custom(f) => f(t),
            _ => self.eval(t),
        }
    }
}

impl<T: Scalar> fmt::Debug for LipschitzProfile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shape = match &self.shape {
            Shape::Ramp => "ramp".to_string(),
            Shape::Clamp(c) => format!("clamp({c})"),
            Shape::Custom(_) => "custom".to_string(),
        };
        f.debug_struct("LipschitzProfile")
            .field("shape", &shape)
            .field("lip", &self.lip)
            .field("sup", &self.sup)
            .field("increasing", &self.increasing)
            .finish()
    }
}
