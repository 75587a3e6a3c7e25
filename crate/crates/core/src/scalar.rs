//! Floating point abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts a literal. Panics only if the literal is not representable at all.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Exponent of an ℓ_p sum; only p = 1 and p = 2 are used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Norm {
    L1,
    L2,
}

impl Norm {
    pub fn exponent(self) -> u32 {
        match self {
            Norm::L1 => 1,
            Norm::L2 => 2,
        }
    }
}

impl std::str::FromStr for Norm {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1" => Ok(Norm::L1),
            "2" => Ok(Norm::L2),
            other => Err(crate::error::Error::InvalidParam(format!(
                "p must be 1 or 2, got `{other}`"
            ))),
        }
    }
}

impl std::fmt::Display for Norm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.exponent())
    }
}

/// Total order over non-NaN scalars, for use as a heap key.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Ordered<T>(pub T);

impl<T: Scalar> Eq for Ordered<T> {}

impl<T: Scalar> PartialOrd for Ordered<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Ordered<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .partial_cmp(&other.0)
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}

/// Relative slack used for invariant checks that are exact in real arithmetic.
pub(crate) fn rel_slack<T: Scalar>(scale: T) -> T {
    let eps = if T::epsilon() > T::lit(1e-10) {
        T::lit(1e-4)
    } else {
        T::lit(1e-9)
    };
    eps * T::one().max(scale.abs())
}

/// Σ_{i<j} |x_i - x_j|^p for p = 1 or 2 in O(n log n).
pub(crate) fn pairwise_spread<T: Scalar>(values: &[T], squared: bool) -> T {
    let n = values.len();
    if n < 2 {
        return T::zero();
    }
    if squared {
        let mean = values.iter().copied().sum::<T>() / T::from_count(n);
        let centered: T = values.iter().map(|&x| (x - mean) * (x - mean)).sum();
        centered * T::from_count(n)
    } else {
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let mut acc = T::zero();
        for (i, &x) in sorted.iter().enumerate() {
            let weight = T::from_count(2 * i + 1) - T::from_count(n);
            acc += x * weight;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spread_matches_quadratic_sum() {
        let xs = [0.5f64, -1.0, 3.0, 2.0, 2.0];
        let mut l1 = 0.0;
        let mut l2 = 0.0;
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                l1 += (xs[i] - xs[j]).abs();
                l2 += (xs[i] - xs[j]).powi(2);
            }
        }
        assert!((pairwise_spread(&xs, false) - l1).abs() < 1e-12);
        assert!((pairwise_spread(&xs, true) - l2).abs() < 1e-12);
    }

    #[test]
    fn f32_literals() {
        assert_eq!(f32::lit(0.25), 0.25f32);
        assert_eq!(f64::from_count(7), 7.0);
    }
}
