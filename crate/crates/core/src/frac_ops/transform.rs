use crate::error::{Error, Result};

/// Fractional order `δ ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FracOrder(f64);

impl FracOrder {
    pub fn new(delta: f64) -> Result<Self> {
        if delta > 0.0 && delta < 1.0 {
            Ok(Self(delta))
        } else {
            Err(Error::invalid(format!("delta must lie in (0,1) (got {delta})")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// The re-scaling `s = ψ(t) = t^r` with `γ = 1/r`, mapping `t ∈ [0, T^γ]` onto `s ∈ [0, T]`.
///
/// `r` is kept as an integer so that `(1 - τ^r)/(1 - τ)` stays a polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformSpec {
    r: u32,
    horizon: f64,
}

impl TransformSpec {
    pub fn new(r: u32, horizon: f64) -> Result<Self> {
        if r == 0 {
            return Err(Error::invalid("transform exponent r must be a positive integer"));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::invalid(format!("horizon T must be positive (got {horizon})")));
        }
        Ok(Self { r, horizon })
    }

    /// Identity map `ψ(t) = t` on `[0, T]`.
    pub fn identity(horizon: f64) -> Result<Self> {
        Self::new(1, horizon)
    }

    /// Builds the transform from a real `γ`, which must be the reciprocal of a positive integer.
    pub fn from_gamma(gamma: f64, horizon: f64) -> Result<Self> {
        let r = (1.0 / gamma).round();
        if !(gamma > 0.0 && gamma <= 1.0) || r < 1.0 || (r * gamma - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("gamma must equal 1/r for a positive integer r (got {gamma})")));
        }
        Self::new(r as u32, horizon)
    }

    #[inline]
    pub fn r(&self) -> u32 {
        self.r
    }

    #[inline]
    pub fn gamma(&self) -> f64 {
        1.0 / self.r as f64
    }

    #[inline]
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Right end `b_ψ = T^γ` of the transformed interval.
    #[inline]
    pub fn right(&self) -> f64 {
        if self.r == 1 {
            self.horizon
        } else {
            self.horizon.powf(self.gamma())
        }
    }

    /// `ψ(t) = t^r`.
    #[inline]
    pub fn psi(&self, t: f64) -> f64 {
        t.powi(self.r as i32)
    }

    /// `ψ'(t) = r t^{r-1}`.
    #[inline]
    pub fn psi_prime(&self, t: f64) -> f64 {
        self.r as f64 * t.powi(self.r as i32 - 1)
    }

    /// `t = s^γ` without range checks.
    #[inline]
    pub fn to_transformed(&self, s: f64) -> f64 {
        if self.r == 1 {
            s
        } else {
            s.powf(self.gamma())
        }
    }

    /// Maps a physical time `s ∈ [0, T]` to `t = s^γ`.
    pub fn transform_sample(&self, s: f64) -> Result<f64> {
        if !(0.0..=self.horizon).contains(&s) {
            return Err(Error::OutOfDomain {
                what: "s",
                value: s,
                lo: 0.0,
                hi: self.horizon,
            });
        }
        Ok(self.to_transformed(s))
    }

    /// Inverse of [`TransformSpec::transform_sample`]: `s = t^r`.
    pub fn inverse_sample(&self, t: f64) -> Result<f64> {
        let b = self.right();
        if !(0.0..=b).contains(&t) {
            return Err(Error::OutOfDomain {
                what: "t",
                value: t,
                lo: 0.0,
                hi: b,
            });
        }
        Ok(self.psi(t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn order_range() {
        assert!(FracOrder::new(0.0).is_err());
        assert!(FracOrder::new(1.0).is_err());
        assert!(FracOrder::new(f64::NAN).is_err());
        assert_eq!(FracOrder::new(0.3).unwrap().value(), 0.3);
    }

    #[test]
    fn gamma_must_be_unit_fraction() {
        assert_eq!(TransformSpec::from_gamma(0.2, 2.0).unwrap().r(), 5);
        assert_eq!(TransformSpec::from_gamma(1.0, 2.0).unwrap().r(), 1);
        assert!(TransformSpec::from_gamma(0.3, 2.0).is_err());
        assert!(TransformSpec::from_gamma(1.5, 2.0).is_err());
        assert!(TransformSpec::new(0, 2.0).is_err());
        assert!(TransformSpec::new(2, -1.0).is_err());
    }

    #[test]
    fn samples() {
        let id = TransformSpec::identity(2.0).unwrap();
        assert_eq!(id.transform_sample(0.5).unwrap(), 0.5);
        let five = TransformSpec::new(5, 2.0).unwrap();
        assert_eq!(five.transform_sample(1.0).unwrap(), 1.0);
        assert_relative_eq!(five.transform_sample(2.0).unwrap(), 1.148_698_354_997_035, epsilon = 1e-15);
        assert!(five.transform_sample(-0.1).is_err());
        assert!(five.transform_sample(2.1).is_err());
        assert_relative_eq!(five.right(), 2f64.powf(0.2), epsilon = 1e-16);
    }

    #[test]
    fn round_trip() {
        for r in 1..=8 {
            let spec = TransformSpec::new(r, 2.0).unwrap();
            for k in 1..=40 {
                let s = 2.0 * k as f64 / 40.0;
                let back = spec.inverse_sample(spec.transform_sample(s).unwrap().min(spec.right())).unwrap();
                assert_relative_eq!(back, s, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn psi_is_increasing() {
        let spec = TransformSpec::new(6, 2.0).unwrap();
        let b = spec.right();
        let mut prev = -1.0;
        for k in 0..=100 {
            let t = b * k as f64 / 100.0;
            assert!(spec.psi_prime(t) >= 0.0);
            let p = spec.psi(t);
            assert!(p > prev);
            prev = p;
        }
    }
}
