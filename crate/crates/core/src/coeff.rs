//! Scalar abstraction for series coefficients.
//!
//! The series engines are generic over the coefficient field. The crate-level
//! aliases instantiate them with exact [`Rational`] coefficients, which is
//! what every verification suite relies on; `f64`/`f32` instantiations exist
//! for quick numeric experiments and share no code path with the exact track.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational number, always kept in lowest terms with a
/// positive denominator (guaranteed by `num-rational`).
pub type Rational = num_rational::BigRational;

/// Shorthand for a rational from an integer pair.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for an integer rational.
pub fn rat(num: i64) -> Rational {
    Rational::from_integer(BigInt::from(num))
}

/// Exact n-th root of a rational, if it exists.
pub fn nth_root_exact(q: &Rational, n: u32) -> Option<Rational> {
    if n == 0 {
        return None;
    }
    if q.is_negative() && n % 2 == 0 {
        return None;
    }
    let num = q.numer().nth_root(n);
    let den = q.denom().nth_root(n);
    let cand = Rational::new(num, den);
    let mut p = Rational::one();
    for _ in 0..n {
        p *= &cand;
    }
    if &p == q {
        Some(cand)
    } else {
        None
    }
}

/// A field-like scalar usable as a series coefficient.
///
/// `from_rational` embeds ℚ; for `Rational` it is the identity, for floats it
/// rounds. Equality against zero decides which coefficients are stored, so
/// float instantiations trade exactness for speed by design.
pub trait Coeff: Clone + PartialEq + Zero + One + std::fmt::Debug + std::fmt::Display {
    fn from_int(n: i64) -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn neg(&self) -> Self;
    fn add_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    /// Exact division; for field scalars this always succeeds on nonzero divisors.
    fn div_ref(&self, other: &Self) -> Self;
    /// Lossy conversion used by the numeric cross-checks.
    fn to_f64(&self) -> f64;
}

impl Coeff for Rational {
    fn from_int(n: i64) -> Self {
        rat(n)
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn neg(&self) -> Self {
        -self
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn div_ref(&self, other: &Self) -> Self {
        self / other
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
}

macro_rules! float_coeff {
    ($t:ty) => {
        impl Coeff for $t {
            fn from_int(n: i64) -> Self {
                n as $t
            }
            fn from_rational(q: &Rational) -> Self {
                rational_to_f64(q) as $t
            }
            fn neg(&self) -> Self {
                -self
            }
            fn add_ref(&self, other: &Self) -> Self {
                self + other
            }
            fn sub_ref(&self, other: &Self) -> Self {
                self - other
            }
            fn mul_ref(&self, other: &Self) -> Self {
                self * other
            }
            fn div_ref(&self, other: &Self) -> Self {
                self / other
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
        }
    };
}
float_coeff!(f64);
float_coeff!(f32);

/// Convert a big rational to `f64` with enough care for huge numerators.
pub fn rational_to_f64(q: &Rational) -> f64 {
    let num_bits = q.numer().bits() as i64;
    let den_bits = q.denom().bits() as i64;
    // Shift both parts into f64 range, then correct with exp2.
    let shift = (num_bits.max(den_bits) - 500).max(0) as u64;
    let num = (q.numer() >> shift).to_string().parse::<f64>().unwrap_or(f64::NAN);
    let den = (q.denom() >> shift).to_string().parse::<f64>().unwrap_or(f64::NAN);
    if den == 0.0 {
        // Denominator underflowed the shift; redo with asymmetric shifts.
        let nshift = (num_bits - 500).max(0) as u64;
        let dshift = (den_bits - 500).max(0) as u64;
        let num = (q.numer() >> nshift).to_string().parse::<f64>().unwrap_or(f64::NAN);
        let den = (q.denom() >> dshift).to_string().parse::<f64>().unwrap_or(f64::NAN);
        return num / den * 2f64.powi((nshift as i32) - (dshift as i32));
    }
    num / den
}

/// Pochhammer symbol (a)_n over the rationals.
pub fn pochhammer(a: &Rational, n: u32) -> Rational {
    let mut acc = Rational::one();
    let mut term = a.clone();
    for _ in 0..n {
        acc *= &term;
        term += Rational::one();
    }
    acc
}

/// Generalized binomial coefficient C(p, k) for rational p.
pub fn binomial_rational(p: &Rational, k: u32) -> Rational {
    let mut acc = Rational::one();
    for j in 0..k {
        acc *= p - rat(j as i64);
        acc /= rat((j + 1) as i64);
    }
    acc
}

/// Factorial as a rational.
pub fn factorial(n: u32) -> Rational {
    let mut acc = Rational::one();
    for j in 2..=n {
        acc *= rat(j as i64);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nth_root() {
        assert_eq!(nth_root_exact(&ratio(1, 16), 4), Some(ratio(1, 2)));
        assert_eq!(nth_root_exact(&ratio(27, 8), 3), Some(ratio(3, 2)));
        assert_eq!(nth_root_exact(&ratio(2, 1), 2), None);
        assert_eq!(nth_root_exact(&ratio(-8, 1), 3), Some(rat(-2)));
        assert_eq!(nth_root_exact(&ratio(-4, 1), 2), None);
    }

    #[test]
    fn pochhammer_values() {
        // (1/2)_3 = 1/2 * 3/2 * 5/2 = 15/8
        assert_eq!(pochhammer(&ratio(1, 2), 3), ratio(15, 8));
        assert_eq!(pochhammer(&rat(1), 5), rat(120));
        assert_eq!(pochhammer(&rat(3), 0), rat(1));
    }

    #[test]
    fn binomial_quarter() {
        // C(1/4, 2) = (1/4)(-3/4)/2 = -3/32
        assert_eq!(binomial_rational(&ratio(1, 4), 2), ratio(-3, 32));
    }

    #[test]
    fn big_to_f64() {
        let q = ratio(355, 113);
        assert!((rational_to_f64(&q) - 355.0 / 113.0).abs() < 1e-15);
        let huge = Rational::new(BigInt::from(10).pow(400), BigInt::from(3) * BigInt::from(10).pow(398));
        assert!((rational_to_f64(&huge) - 100.0 / 3.0).abs() < 1e-12);
    }
}
